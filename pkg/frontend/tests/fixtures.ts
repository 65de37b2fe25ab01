import { spawn, ChildProcess } from 'node:child_process'

import type { MachineProfileDoc, SceneDoc, Vec3 } from '../src/types'

export const BENCH_PROFILE: MachineProfileDoc = {
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

/** Planar path with three consecutive same-direction 90-degree bends.
 *  Every feed clears the 8.39 mm minimum so the scene stays exportable. */
export const STAIRCASE: Vec3[] = [
  [0, 0, 0],
  [10, 0, 0],
  [10, 10, 0],
  [0, 10, 0],
  [0, 0.5, 0],
]

export const SCENE_FIXTURE: SceneDoc = {
  version: 1,
  profile_ref: 'bench',
  next_label: 2,
  parts: [{ label: 1, points: STAIRCASE }],
  splices: [],
}

export interface ServiceHandle {
  url: string
  stop: () => void
}

/** Spawn the Python geometry service and wait for it to answer. */
export async function startService(port: number): Promise<ServiceHandle> {
  const child: ChildProcess = spawn('python3', ['-m', 'wirebend.service'], {
    env: { ...process.env, PORT: String(port) },
    stdio: ['ignore', 'pipe', 'pipe'],
  })
  const stderr: string[] = []
  child.stderr?.on('data', (chunk) => stderr.push(String(chunk)))

  const url = `http://127.0.0.1:${port}`
  const deadline = Date.now() + 30_000
  for (;;) {
    try {
      const res = await fetch(`${url}/scene`, { headers: { 'X-Session-Id': 'probe' } })
      if (res.status === 404 || res.ok) break // up: 404 just means no scene yet
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill()
      throw new Error(`service did not come up on ${url}\n${stderr.join('')}`)
    }
    await new Promise((r) => setTimeout(r, 150))
  }
  return { url, stop: () => child.kill() }
}
