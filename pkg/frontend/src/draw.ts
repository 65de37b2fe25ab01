import * as THREE from 'three'

import type { Vec3 } from './types'

/**
 * Ground-plane sketching: pointer rays are intersected with a horizontal
 * plane at the active elevation, replacing mid-air input. The elevation
 * handle raises or lowers that plane between strokes.
 */
export class GroundSketcher {
  elevation = 0
  private stroke: Vec3[] = []
  private readonly ray = new THREE.Raycaster()

  setElevation(mm: number): void {
    this.elevation = mm
  }

  /** Map a normalized device coordinate to the sketch plane, if it hits. */
  groundPoint(camera: THREE.Camera, ndcX: number, ndcY: number): Vec3 | null {
    this.ray.setFromCamera(new THREE.Vector2(ndcX, ndcY), camera)
    const plane = new THREE.Plane(new THREE.Vector3(0, 1, 0), -this.elevation)
    const hit = new THREE.Vector3()
    if (!this.ray.ray.intersectPlane(plane, hit)) return null
    return [hit.x, hit.y, hit.z]
  }

  begin(): void {
    this.stroke = []
  }

  /** Append a point, skipping jitter below the wire scale. */
  addPoint(point: Vec3, minStepMm = 1.0): void {
    const last = this.stroke[this.stroke.length - 1]
    if (last) {
      const dx = point[0] - last[0]
      const dy = point[1] - last[1]
      const dz = point[2] - last[2]
      if (Math.hypot(dx, dy, dz) < minStepMm) return
    }
    this.stroke.push(point)
  }

  /** Finish the stroke; returns null when too short to be a wire. */
  finish(): Vec3[] | null {
    const result = this.stroke
    this.stroke = []
    return result.length >= 2 ? result : null
  }

  /** Points captured so far (for live preview while dragging). */
  snapshot(): Vec3[] {
    return this.stroke.slice()
  }

  get length(): number {
    return this.stroke.length
  }
}
