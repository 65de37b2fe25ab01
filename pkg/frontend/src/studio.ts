import * as THREE from 'three'

import { StudioClient } from './api.js'
import { GroundSketcher } from './draw.js'
import {
  buildSceneGraph,
  conflictMarkerCount,
  updateConflictMarkers,
} from './sceneGraph.js'
import type {
  EndpointRef,
  ExportBundle,
  MachineProfileDoc,
  SceneDoc,
  ToolName,
  Vec3,
} from './types'

/**
 * Headless studio core: tool state, service round trips and the 3D
 * scene graph. The browser entry point wires this to a renderer and DOM
 * panels; tests drive it directly against a live service.
 *
 * The scene document held by the service is the single source of truth:
 * every mutation re-renders the graph from the response scene.
 */
export class StudioApp {
  readonly client: StudioClient
  readonly sketcher = new GroundSketcher()

  activeTool: ToolName = 'draw'
  scene: SceneDoc | null = null
  root: THREE.Group = new THREE.Group()
  pendingEndpoint: EndpointRef | null = null
  lastError: string | null = null
  onSceneChanged: (root: THREE.Group) => void = () => {}

  constructor(baseUrl: string, sessionId = 'default') {
    this.client = new StudioClient(baseUrl, sessionId)
  }

  setTool(tool: ToolName): void {
    this.activeTool = tool
    this.pendingEndpoint = null
  }

  private applyScene(scene: SceneDoc): SceneDoc {
    this.scene = scene
    this.root = buildSceneGraph(scene)
    this.onSceneChanged(this.root)
    return scene
  }

  async init(profile: MachineProfileDoc, scene?: SceneDoc): Promise<SceneDoc> {
    return this.applyScene(await this.client.initScene(profile, scene))
  }

  async refresh(): Promise<SceneDoc> {
    return this.applyScene(await this.client.getScene())
  }

  /** Commit a finished sketch stroke as a new wire part. */
  async commitStroke(points: Vec3[]): Promise<SceneDoc> {
    return this.applyScene(await this.client.addPolyline(points))
  }

  async placeConnector(
    kind: string,
    params: Record<string, number | boolean>
  ): Promise<SceneDoc> {
    return this.applyScene(await this.client.addConnector(kind, params))
  }

  async simplifyPart(label: number): Promise<SceneDoc> {
    return this.applyScene(await this.client.simplifyPart(label))
  }

  async deletePart(label: number): Promise<SceneDoc> {
    return this.applyScene(await this.client.deletePart(label))
  }

  async placeTrack(points: Vec3[]): Promise<SceneDoc> {
    return this.applyScene(await this.client.addTrack(points))
  }

  async undo(): Promise<SceneDoc> {
    return this.applyScene(await this.client.undo())
  }

  /**
   * Link tool: click two endpoint labels to splice them. The first pick
   * is held until the second arrives; picking the same endpoint twice
   * cancels the selection.
   */
  async pickEndpoint(pick: EndpointRef): Promise<SceneDoc | null> {
    if (
      this.pendingEndpoint &&
      this.pendingEndpoint.label === pick.label &&
      this.pendingEndpoint.which === pick.which
    ) {
      this.pendingEndpoint = null
      return null
    }
    if (!this.pendingEndpoint) {
      this.pendingEndpoint = pick
      return null
    }
    const first = this.pendingEndpoint
    this.pendingEndpoint = null
    return this.applyScene(
      await this.client.link(first.label, first.which, pick.label, pick.which)
    )
  }

  /** Re-query conflicts and redraw the green closest-point markers. */
  async refreshConflicts(): Promise<number> {
    const { conflicts } = await this.client.conflicts()
    updateConflictMarkers(this.root, conflicts)
    return conflictMarkerCount(this.root)
  }

  async exportBundle(): Promise<ExportBundle> {
    return this.client.exportBundle()
  }

  /** Surface a service failure as a toast message; returns the text. */
  toast(err: unknown): string {
    this.lastError = err instanceof Error ? err.message : String(err)
    return this.lastError
  }
}
