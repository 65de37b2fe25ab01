import type {
  ConflictDoc,
  ExportBundle,
  MachineProfileDoc,
  OrientationWarningDoc,
  SceneDoc,
  Vec3,
} from './types'

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
    message: string
  ) {
    super(message)
  }
}

/** Typed client for the local geometry service. */
export class StudioClient {
  constructor(
    readonly baseUrl: string,
    readonly sessionId: string = 'default'
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: {
        'Content-Type': 'application/json',
        'X-Session-Id': this.sessionId,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    const text = await res.text()
    const payload = text ? JSON.parse(text) : null
    if (!res.ok) {
      const detail =
        payload && typeof payload === 'object' && 'message' in payload
          ? String((payload as { message: unknown }).message)
          : res.statusText
      throw new ServiceError(res.status, payload, `${res.status}: ${detail}`)
    }
    return payload as T
  }

  initScene(profile: MachineProfileDoc, scene?: SceneDoc): Promise<SceneDoc> {
    return this.request('POST', '/scene', { profile, scene })
  }

  getScene(): Promise<SceneDoc> {
    return this.request('GET', '/scene')
  }

  addPolyline(points: Vec3[]): Promise<SceneDoc> {
    return this.request('POST', '/parts', { points })
  }

  addConnector(kind: string, params: Record<string, number | boolean>): Promise<SceneDoc> {
    return this.request('POST', '/parts', { kind, params })
  }

  deletePart(label: number): Promise<SceneDoc> {
    return this.request('DELETE', `/parts/${label}`)
  }

  simplifyPart(label: number, smoothing = 0.4, minReduction = 0.0): Promise<SceneDoc> {
    return this.request('POST', `/parts/${label}/simplify`, {
      smoothing_strength: smoothing,
      min_reduction_ratio: minReduction,
    })
  }

  link(
    partA: number,
    endA: 'start' | 'end',
    partB: number,
    endB: 'start' | 'end',
    sleeveLengthMm = 10.0
  ): Promise<SceneDoc> {
    return this.request('POST', '/links', {
      part_a: partA,
      end_a: endA,
      part_b: partB,
      end_b: endB,
      sleeve_length_mm: sleeveLengthMm,
    })
  }

  conflicts(): Promise<{ conflicts: ConflictDoc[] }> {
    return this.request('GET', '/conflicts')
  }

  orientationWarnings(): Promise<{ warnings: OrientationWarningDoc[] }> {
    return this.request('GET', '/warnings/orientation')
  }

  addTrack(points: Vec3[], marbleDiameterMm = 16.0, clipSpacingMm = 50.0): Promise<SceneDoc> {
    return this.request('POST', '/track', {
      center: { points },
      marble_diameter_mm: marbleDiameterMm,
      clip_spacing_mm: clipSpacingMm,
    })
  }

  exportBundle(format: 'coords' | 'frb' = 'coords'): Promise<ExportBundle> {
    return this.request('POST', '/export', { format })
  }

  undo(): Promise<SceneDoc> {
    return this.request('POST', '/undo')
  }
}
