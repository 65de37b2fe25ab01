import * as THREE from 'three'

import { StudioApp } from './studio.js'
import type { MachineProfileDoc, ToolName } from './types'

// Browser shell: renderer, camera rig, toolbar and panels around the
// headless StudioApp core. All geometry state lives on the service.

const SERVICE_URL =
  new URLSearchParams(location.search).get('service') ?? 'http://127.0.0.1:8571'

const DEFAULT_PROFILE: MachineProfileDoc = {
  version: 1,
  die_diameter_mm: 20.0,
  pin_diameter_mm: 10.0,
  wire_diameter_mm: 1.6,
  clearance_gap_mm: 2.0,
  max_bend_deg: 135.0,
  min_plastic_deg: 15.0,
  springback: [
    [15, 0],
    [25, 12],
    [35, 24],
    [45, 36],
    [55, 47],
    [65, 58],
    [75, 69],
    [85, 80],
  ],
}

const CONNECTOR_FORMS: Record<string, Record<string, number | boolean>> = {
  CylinderWrap: { object_diameter_mm: 66, grip_factor: 0.05, wrap_turns: 1.25 },
  TableEdgeClip: { edge_thickness_mm: 25, depth_mm: 40 },
  PegboardPin: { hole_spacing_mm: 25.4, hole_diameter_mm: 6.35 },
  Clamp: { jaw_gap_mm: 14, two_axis: false },
  CupHolder: { cup_diameter_mm: 66, ring_drop_mm: 40 },
  Hook: { opening_mm: 30, shank_mm: 40 },
}

class OrbitRig {
  // minimal orbit/pan/zoom; drag to orbit, wheel to zoom, shift-drag to pan
  target = new THREE.Vector3(0, 50, 0)
  theta = Math.PI / 4
  phi = Math.PI / 3
  radius = 600

  constructor(readonly camera: THREE.PerspectiveCamera, dom: HTMLElement) {
    let dragging = false
    let panning = false
    let lastX = 0
    let lastY = 0
    dom.addEventListener('pointerdown', (e) => {
      if (e.button !== 1 && !(e.button === 0 && e.ctrlKey)) return
      dragging = true
      panning = e.shiftKey
      lastX = e.clientX
      lastY = e.clientY
    })
    window.addEventListener('pointerup', () => (dragging = false))
    window.addEventListener('pointermove', (e) => {
      if (!dragging) return
      const dx = e.clientX - lastX
      const dy = e.clientY - lastY
      lastX = e.clientX
      lastY = e.clientY
      if (panning) {
        const scale = this.radius / 800
        const right = new THREE.Vector3().setFromMatrixColumn(this.camera.matrix, 0)
        const up = new THREE.Vector3().setFromMatrixColumn(this.camera.matrix, 1)
        this.target.addScaledVector(right, -dx * scale)
        this.target.addScaledVector(up, dy * scale)
      } else {
        this.theta -= dx * 0.005
        this.phi = Math.min(Math.max(this.phi - dy * 0.005, 0.05), Math.PI - 0.05)
      }
      this.apply()
    })
    dom.addEventListener('wheel', (e) => {
      this.radius = Math.min(Math.max(this.radius * (1 + e.deltaY * 0.001), 50), 5000)
      this.apply()
    })
    this.apply()
  }

  apply(): void {
    const sp = Math.sin(this.phi)
    this.camera.position.set(
      this.target.x + this.radius * sp * Math.cos(this.theta),
      this.target.y + this.radius * Math.cos(this.phi),
      this.target.z + this.radius * sp * Math.sin(this.theta)
    )
    this.camera.lookAt(this.target)
  }
}

function labelSprite(text: string): THREE.Sprite {
  const canvas = document.createElement('canvas')
  canvas.width = 64
  canvas.height = 64
  const ctx = canvas.getContext('2d')!
  ctx.fillStyle = '#ffd54f'
  ctx.beginPath()
  ctx.arc(32, 32, 30, 0, Math.PI * 2)
  ctx.fill()
  ctx.fillStyle = '#1a1a1a'
  ctx.font = 'bold 36px sans-serif'
  ctx.textAlign = 'center'
  ctx.textBaseline = 'middle'
  ctx.fillText(text, 32, 34)
  const sprite = new THREE.Sprite(
    new THREE.SpriteMaterial({ map: new THREE.CanvasTexture(canvas) })
  )
  sprite.scale.setScalar(14)
  return sprite
}

function toast(message: string): void {
  const el = document.getElementById('toast')!
  el.textContent = message
  el.classList.add('show')
  setTimeout(() => el.classList.remove('show'), 4000)
}

async function guarded<T>(run: () => Promise<T>): Promise<T | null> {
  try {
    return await run()
  } catch (err) {
    toast(app.toast(err))
    return null
  }
}

const viewport = document.getElementById('viewport')!
const renderer = new THREE.WebGLRenderer({ antialias: true })
renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2))
renderer.setSize(viewport.clientWidth, viewport.clientHeight)
renderer.setClearColor(0x15191e)
viewport.appendChild(renderer.domElement)

const world = new THREE.Scene()
world.add(new THREE.GridHelper(1000, 50, 0x39464e, 0x242c31))
world.add(new THREE.AxesHelper(120))
world.add(new THREE.HemisphereLight(0xffffff, 0x30353a, 1.0))

const camera = new THREE.PerspectiveCamera(
  50,
  viewport.clientWidth / viewport.clientHeight,
  0.1,
  20000
)
const rig = new OrbitRig(camera, renderer.domElement)

const app = new StudioApp(SERVICE_URL)
let graph: THREE.Group = app.root
world.add(graph)

app.onSceneChanged = (root) => {
  world.remove(graph)
  graph = root
  decorate(root)
  world.add(graph)
  renderPlanPanel(null)
}

function decorate(root: THREE.Group): void {
  // pickable endpoint spheres and numbered label sprites
  root.traverse((obj) => {
    if (obj.name.startsWith('endpoint-')) {
      const ball = new THREE.Mesh(
        new THREE.SphereGeometry(3.2, 12, 12),
        new THREE.MeshBasicMaterial({ color: 0x4fc3f7 })
      )
      ball.name = `${obj.name}-pick`
      obj.add(ball)
    } else if (obj.name.startsWith('label-')) {
      obj.add(labelSprite(String(obj.userData.text)))
    }
  })
}

// ---------------------------------------------------------------------------
// pointer interaction

const picker = new THREE.Raycaster()
let strokeActive = false
const strokePreview = new THREE.Line(
  new THREE.BufferGeometry(),
  new THREE.LineBasicMaterial({ color: 0x4fc3f7 })
)
world.add(strokePreview)

function ndc(e: PointerEvent): [number, number] {
  const r = renderer.domElement.getBoundingClientRect()
  return [((e.clientX - r.left) / r.width) * 2 - 1, (-(e.clientY - r.top) / r.height) * 2 + 1]
}

renderer.domElement.addEventListener('pointerdown', (e) => {
  if (e.button !== 0 || e.ctrlKey) return
  const [x, y] = ndc(e)
  if (app.activeTool === 'draw' || app.activeTool === 'track') {
    strokeActive = true
    app.sketcher.begin()
    const p = app.sketcher.groundPoint(camera, x, y)
    if (p) app.sketcher.addPoint(p)
  } else if (app.activeTool === 'link' || app.activeTool === 'delete') {
    pickObject(x, y)
  }
})

renderer.domElement.addEventListener('pointermove', (e) => {
  if (!strokeActive) return
  const [x, y] = ndc(e)
  const p = app.sketcher.groundPoint(camera, x, y)
  if (p) {
    app.sketcher.addPoint(p, 4.0)
    previewStroke()
  }
})

renderer.domElement.addEventListener('pointerup', async () => {
  if (!strokeActive) return
  strokeActive = false
  const stroke = app.sketcher.finish()
  strokePreview.geometry.setFromPoints([])
  if (!stroke) return
  if (app.activeTool === 'track') {
    await guarded(() => app.placeTrack(stroke))
  } else {
    const scene = await guarded(() => app.commitStroke(stroke))
    if (scene) {
      const label = scene.parts[scene.parts.length - 1].label
      await guarded(() => app.simplifyPart(label))
    }
  }
})

function previewStroke(): void {
  strokePreview.geometry.setFromPoints(
    app.sketcher.snapshot().map(([x, y, z]) => new THREE.Vector3(x, y, z))
  )
}

function pickObject(x: number, y: number): void {
  picker.setFromCamera(new THREE.Vector2(x, y), camera)
  const hits = picker.intersectObjects(graph.children, true)
  for (const hit of hits) {
    let obj: THREE.Object3D | null = hit.object
    while (obj) {
      if (app.activeTool === 'link' && obj.name.startsWith('endpoint-')) {
        const { label, which } = obj.userData as { label: number; which: 'start' | 'end' }
        void guarded(async () => {
          const scene = await app.pickEndpoint({ label, which })
          if (!scene) toast(`endpoint ${label}/${which} selected`)
          return scene
        })
        return
      }
      if (app.activeTool === 'delete' && obj.name.startsWith('part-')) {
        const label = obj.userData.label as number
        void guarded(() => app.deletePart(label))
        return
      }
      obj = obj.parent
    }
  }
}

// ---------------------------------------------------------------------------
// toolbar and panels

function bindToolbar(): void {
  for (const tool of ['draw', 'connector', 'link', 'delete', 'track'] as ToolName[]) {
    document.getElementById(`tool-${tool}`)!.addEventListener('click', () => {
      app.setTool(tool)
      document
        .querySelectorAll('#toolbar button')
        .forEach((b) => b.classList.toggle('active', b.id === `tool-${tool}`))
      document.getElementById('connector-panel')!.hidden = tool !== 'connector'
    })
  }
  document.getElementById('btn-collide')!.addEventListener('click', () =>
    guarded(async () => {
      const n = await app.refreshConflicts()
      toast(n === 0 ? 'no conflicts' : `${n} potential collision(s) marked in green`)
      return n
    })
  )
  document.getElementById('btn-undo')!.addEventListener('click', () => guarded(() => app.undo()))
  document.getElementById('btn-export')!.addEventListener('click', () =>
    guarded(async () => {
      const bundle = await app.exportBundle()
      for (const [name, text] of Object.entries(bundle.files)) {
        downloadFile(name, text)
      }
      downloadFile('assembly_plan.json', JSON.stringify(bundle.plan, null, 2) + '\n')
      renderPlanPanel(bundle.plan)
      return bundle
    })
  )
  const elevation = document.getElementById('elevation') as HTMLInputElement
  elevation.addEventListener('input', () => {
    app.sketcher.setElevation(Number(elevation.value))
    document.getElementById('elevation-value')!.textContent = `${elevation.value} mm`
  })

  const kindSelect = document.getElementById('connector-kind') as HTMLSelectElement
  for (const kind of Object.keys(CONNECTOR_FORMS)) {
    const opt = document.createElement('option')
    opt.value = kind
    opt.textContent = kind
    kindSelect.appendChild(opt)
  }
  kindSelect.addEventListener('change', renderConnectorForm)
  renderConnectorForm()
  document.getElementById('connector-place')!.addEventListener('click', () =>
    guarded(() => app.placeConnector(currentKind(), readConnectorForm()))
  )
}

function currentKind(): string {
  return (document.getElementById('connector-kind') as HTMLSelectElement).value
}

function renderConnectorForm(): void {
  const form = document.getElementById('connector-form')!
  form.innerHTML = ''
  for (const [name, value] of Object.entries(CONNECTOR_FORMS[currentKind()])) {
    const row = document.createElement('label')
    row.textContent = name
    const input = document.createElement('input')
    if (typeof value === 'boolean') {
      input.type = 'checkbox'
      input.checked = value
    } else {
      input.type = 'number'
      input.step = 'any'
      input.value = String(value)
    }
    input.name = name
    row.appendChild(input)
    form.appendChild(row)
  }
}

function readConnectorForm(): Record<string, number | boolean> {
  const params: Record<string, number | boolean> = {}
  document
    .querySelectorAll<HTMLInputElement>('#connector-form input')
    .forEach((input) => {
      params[input.name] = input.type === 'checkbox' ? input.checked : Number(input.value)
    })
  return params
}

function renderPlanPanel(plan: { steps: { part_label: number; action: string; counterpart_label?: number }[] } | null): void {
  const panel = document.getElementById('plan-panel')!
  if (!plan) {
    panel.hidden = true
    return
  }
  panel.hidden = false
  panel.innerHTML = '<h3>Assembly steps</h3>'
  const list = document.createElement('ol')
  for (const step of plan.steps) {
    const li = document.createElement('li')
    li.textContent =
      step.action === 'bend'
        ? `bend part ${step.part_label}`
        : `crimp part ${step.part_label} to part ${step.counterpart_label}`
    list.appendChild(li)
  }
  panel.appendChild(list)
}

function downloadFile(name: string, text: string): void {
  const blob = new Blob([text], { type: 'text/plain' })
  const a = document.createElement('a')
  a.href = URL.createObjectURL(blob)
  a.download = name
  a.click()
  URL.revokeObjectURL(a.href)
}

function frame(): void {
  requestAnimationFrame(frame)
  renderer.render(world, camera)
}

window.addEventListener('resize', () => {
  camera.aspect = viewport.clientWidth / viewport.clientHeight
  camera.updateProjectionMatrix()
  renderer.setSize(viewport.clientWidth, viewport.clientHeight)
})

bindToolbar()
void guarded(async () => {
  try {
    return await app.refresh() // resume an existing session
  } catch {
    return await app.init(DEFAULT_PROFILE)
  }
})
rig.apply()
frame()
