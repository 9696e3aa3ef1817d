import * as THREE from "three";

import { Api } from "../api";
import { button, el } from "../dom";
import type { JointDef } from "../types";
import {
  CameraPose,
  OrbitState,
  Viewpoint,
  boneIndexPairs,
  cameraForViewpoint,
} from "./skeleton";

// Minimal renderer surface so headless tests can inject a stub instead of a
// WebGL context.
export interface Renderer3D {
  domElement: HTMLElement;
  setSize(width: number, height: number): void;
  render(scene: THREE.Scene, camera: THREE.Camera): void;
  dispose(): void;
}

export type RendererFactory = (width: number, height: number) => Renderer3D;

function defaultRendererFactory(width: number, height: number): Renderer3D {
  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(width, height);
  return renderer as unknown as Renderer3D;
}

export interface MotionPaneOptions {
  title?: string;
  regions?: string[]; // e.g. ["left_hand", "right_hand"] for the hand pane
  withViewpoints?: boolean;
  rendererFactory?: RendererFactory;
  width?: number;
  height?: number;
}

/**
 * 3D skeleton pane. Poses are fetched for the shared display time and drawn
 * as bone segments; preset viewpoints (top/left/right/bottom) frame the
 * skeleton's centroid, and free mode orbits/zooms like a 3D editor.
 */
export class MotionPane {
  readonly el: HTMLElement;
  viewpoint: Viewpoint = "free";
  lastCameraPose: CameraPose | null = null;
  poseTime = -1;

  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private renderer: Renderer3D;
  private lines: THREE.LineSegments;
  private positions: Float32Array;
  private jointIndices: number[]; // rows of the full pose used by this pane
  private pairs: [number, number][];
  private pose: number[][] = [];
  private fetching: Promise<void> | null = null;
  private orbit: OrbitState = { azimuthRad: 0.6, elevationRad: 0.35, zoom: 1 };
  private buttons = new Map<Viewpoint, HTMLButtonElement>();

  constructor(
    private api: Api,
    private sessionId: string,
    joints: JointDef[],
    options: MotionPaneOptions = {},
  ) {
    const width = options.width ?? 420;
    const height = options.height ?? 320;
    this.el = el("div", "pane pane-motion");
    this.el.appendChild(el("h3", "pane-title", options.title ?? "3D motion"));

    const regions = options.regions;
    this.jointIndices = joints
      .map((joint, i) => ({ joint, i }))
      .filter(({ joint }) => !regions || regions.includes(joint.region))
      .map(({ i }) => i);
    const subset = this.jointIndices.map((i) => joints[i]);
    // reindex parents into the subset; bones crossing the cut are dropped
    const subsetIndex = new Map(this.jointIndices.map((full, sub) => [full, sub]));
    const reindexed: JointDef[] = subset.map((joint, sub) => {
      const fullParent = joint.parent;
      const parent =
        fullParent !== null && subsetIndex.has(fullParent)
          ? (subsetIndex.get(fullParent) as number)
          : null;
      return { ...joint, parent };
    });
    this.pairs = boneIndexPairs(reindexed);

    this.positions = new Float32Array(this.pairs.length * 6);
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute("position", new THREE.BufferAttribute(this.positions, 3));
    this.lines = new THREE.LineSegments(
      geometry,
      new THREE.LineBasicMaterial({ color: 0x7be2a8 }),
    );
    this.scene.add(this.lines);
    this.scene.background = new THREE.Color(0x14161d);

    this.camera = new THREE.PerspectiveCamera(45, width / height, 0.01, 100);
    this.renderer = (options.rendererFactory ?? defaultRendererFactory)(
      width,
      height,
    );
    this.el.appendChild(this.renderer.domElement);

    if (options.withViewpoints !== false) {
      const bar = el("div", "viewpoint-bar");
      const presets: Viewpoint[] = ["top", "left", "right", "bottom", "free"];
      for (const preset of presets) {
        const b = button(preset, "viewpoint", () => this.setViewpoint(preset));
        this.buttons.set(preset, b);
        bar.appendChild(b);
      }
      this.el.appendChild(bar);
      this.attachOrbitControls();
    }
  }

  private attachOrbitControls(): void {
    const surface = this.renderer.domElement;
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    surface.addEventListener("pointerdown", (ev: PointerEvent) => {
      dragging = true;
      lastX = ev.clientX;
      lastY = ev.clientY;
      this.setViewpoint("free");
    });
    surface.addEventListener("pointermove", (ev: PointerEvent) => {
      if (!dragging) return;
      this.orbit.azimuthRad -= (ev.clientX - lastX) * 0.01;
      this.orbit.elevationRad = Math.min(
        Math.max(this.orbit.elevationRad + (ev.clientY - lastY) * 0.01, -1.4),
        1.4,
      );
      lastX = ev.clientX;
      lastY = ev.clientY;
    });
    surface.addEventListener("pointerup", () => {
      dragging = false;
    });
    surface.addEventListener("wheel", (ev: WheelEvent) => {
      ev.preventDefault();
      this.orbit.zoom = Math.min(
        Math.max(this.orbit.zoom * (ev.deltaY < 0 ? 1.1 : 0.9), 0.2),
        6,
      );
    });
  }

  setViewpoint(viewpoint: Viewpoint): void {
    this.viewpoint = viewpoint;
    for (const [preset, b] of this.buttons) {
      b.classList.toggle("active", preset === viewpoint);
    }
  }

  /** Fetch the pose for the display time (skipped while one is in flight). */
  ensurePose(t: number): Promise<void> {
    if (this.fetching) return this.fetching;
    if (Math.abs(t - this.poseTime) < 1e-6 && this.pose.length) {
      return Promise.resolve();
    }
    this.fetching = this.api
      .pose(this.sessionId, t)
      .then((pose) => {
        this.pose = pose.map((row) => [row[0], row[1], row[2]]);
        this.poseTime = t;
      })
      .finally(() => {
        this.fetching = null;
      });
    return this.fetching;
  }

  /** Rows of the latest full pose that this pane displays. */
  get displayedPose(): number[][] {
    return this.jointIndices.map((i) => this.pose[i]).filter(Boolean);
  }

  render(displayTime: number): void {
    void this.ensurePose(displayTime);
    const pose = this.displayedPose;
    if (!pose.length) return;
    this.pairs.forEach(([a, b], k) => {
      this.positions.set(pose[a], k * 6);
      this.positions.set(pose[b], k * 6 + 3);
    });
    this.lines.geometry.attributes.position.needsUpdate = true;

    const cameraPose = cameraForViewpoint(this.viewpoint, pose, this.orbit);
    this.lastCameraPose = cameraPose;
    this.camera.position.set(...cameraPose.position);
    this.camera.up.set(...cameraPose.up);
    this.camera.lookAt(...cameraPose.target);
    this.renderer.render(this.scene, this.camera);
  }

  dispose(): void {
    this.renderer.dispose();
    this.lines.geometry.dispose();
  }
}
