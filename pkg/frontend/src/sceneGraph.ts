import * as THREE from 'three'

import type { ConflictDoc, SceneDoc } from './types'

// Colors follow the feedback language users already know: wire parts in
// neutral steel, selected endpoints amber, collision markers green.
export const WIRE_COLOR = 0xb0bec5
export const BRIDGE_SELECT_COLOR = 0xffb300
export const CONFLICT_COLOR = 0x00e676

export const CONFLICT_MARKER = 'conflict-marker'

/**
 * Build the renderable graph for a scene document.
 *
 * Everything here is renderer-agnostic (lines, empty anchors) so the
 * same code runs under tests without a GPU; the browser entry point
 * decorates label anchors with text sprites.
 */
export function buildSceneGraph(scene: SceneDoc): THREE.Group {
  const root = new THREE.Group()
  root.name = 'scene'
  root.userData.nextLabel = scene.next_label

  const parts = new THREE.Group()
  parts.name = 'parts'
  for (const part of scene.parts) {
    const geometry = new THREE.BufferGeometry().setFromPoints(
      part.points.map(([x, y, z]) => new THREE.Vector3(x, y, z))
    )
    const line = new THREE.Line(geometry, new THREE.LineBasicMaterial({ color: WIRE_COLOR }))
    line.name = `part-${part.label}`
    line.userData.label = part.label

    for (const which of ['start', 'end'] as const) {
      const idx = which === 'start' ? 0 : part.points.length - 1
      const handle = new THREE.Object3D()
      handle.name = `endpoint-${part.label}-${which}`
      handle.position.set(...part.points[idx])
      handle.userData = { label: part.label, which }
      line.add(handle)
    }

    const anchor = new THREE.Object3D()
    anchor.name = `label-${part.label}`
    const mid = part.points[Math.floor(part.points.length / 2)]
    anchor.position.set(mid[0], mid[1] + 6, mid[2])
    anchor.userData.text = String(part.label)
    line.add(anchor)

    parts.add(line)
  }
  root.add(parts)

  const splices = new THREE.Group()
  splices.name = 'splices'
  scene.splices.forEach((splice, i) => {
    const marker = new THREE.Object3D()
    marker.name = `splice-${i}`
    marker.userData = { ...splice }
    splices.add(marker)
  })
  root.add(splices)

  const conflicts = new THREE.Group()
  conflicts.name = 'conflicts'
  root.add(conflicts)

  return root
}

/** Replace the green closest-point markers from a conflict report. */
export function updateConflictMarkers(root: THREE.Group, conflicts: ConflictDoc[]): number {
  const group = root.getObjectByName('conflicts') as THREE.Group
  group.clear()
  for (const conflict of conflicts) {
    const geometry = new THREE.BufferGeometry().setFromPoints([
      new THREE.Vector3(...conflict.closest_point_a),
      new THREE.Vector3(...conflict.closest_point_b),
    ])
    const marker = new THREE.LineSegments(
      geometry,
      new THREE.LineBasicMaterial({ color: CONFLICT_COLOR })
    )
    marker.name = CONFLICT_MARKER
    marker.userData = { ...conflict }
    group.add(marker)
  }
  return conflicts.length
}

export function conflictMarkerCount(root: THREE.Group): number {
  const group = root.getObjectByName('conflicts')
  return group ? group.children.length : 0
}

export function partLabels(root: THREE.Group): number[] {
  const group = root.getObjectByName('parts')
  if (!group) return []
  return group.children
    .map((child) => child.userData.label as number)
    .sort((a, b) => a - b)
}

/** Structural fingerprint used to verify stateless re-rendering. */
export function graphFingerprint(root: THREE.Group): string {
  const lines: string[] = []
  root.traverse((obj) => {
    const pos = obj.position
    lines.push(`${obj.name}@${pos.x.toFixed(6)},${pos.y.toFixed(6)},${pos.z.toFixed(6)}`)
    const geom = (obj as THREE.Line).geometry as THREE.BufferGeometry | undefined
    const attr = geom?.getAttribute?.('position')
    if (attr) {
      const coords: string[] = []
      for (let i = 0; i < attr.count; i++) {
        coords.push(
          `${attr.getX(i).toFixed(6)},${attr.getY(i).toFixed(6)},${attr.getZ(i).toFixed(6)}`
        )
      }
      lines.push(coords.join(';'))
    }
  })
  return lines.join('\n')
}
