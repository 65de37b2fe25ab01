// Wire types mirroring the service's JSON bodies. The scene document is
// the single source of truth; the studio never keeps geometry of its own.

export type Vec3 = [number, number, number]

export interface PartDoc {
  label: number
  points: Vec3[]
}

export interface SpliceDoc {
  part_a: number
  end_a: 'start' | 'end'
  part_b: number
  end_b: 'start' | 'end'
  sleeve_length_mm: number
}

export interface ClipDoc {
  point: Vec3
  frame: [Vec3, Vec3, Vec3]
}

export interface SceneDoc {
  version: number
  profile_ref: string
  next_label: number
  parts: PartDoc[]
  splices: SpliceDoc[]
  clip_positions?: ClipDoc[]
}

export interface ConflictDoc {
  part: number
  segment_a: number
  segment_b: number
  closest_point_a: Vec3
  closest_point_b: Vec3
  min_distance_mm: number
}

export interface OrientationWarningDoc {
  splice_index: number
  part_a: number
  part_b: number
  height_delta_mm: number
  message: string
}

export interface AssemblyStepDoc {
  part_label: number
  file_name: string
  action: 'bend' | 'splice'
  counterpart_label?: number
}

export interface ExportBundle {
  files: Record<string, string>
  plan: { version: number; steps: AssemblyStepDoc[] }
}

export interface MachineProfileDoc {
  version: number
  die_diameter_mm: number
  pin_diameter_mm: number
  wire_diameter_mm: number
  clearance_gap_mm: number
  max_bend_deg: number
  min_plastic_deg: number
  springback: [number, number][]
}

export type ToolName =
  | 'draw'
  | 'connector'
  | 'link'
  | 'modify'
  | 'delete'
  | 'track'
  | 'export'

export interface EndpointRef {
  label: number
  which: 'start' | 'end'
}
