import type { JointDef } from "../types";

// Pure skeleton geometry and camera placement, kept free of three.js so the
// math is testable headless. World frame is right-handed, +Y up.

export type Viewpoint = "top" | "left" | "right" | "bottom" | "free";

export interface CameraPose {
  position: [number, number, number];
  target: [number, number, number];
  up: [number, number, number];
}

export function centroid(pose: number[][]): [number, number, number] {
  let x = 0;
  let y = 0;
  let z = 0;
  for (const [px, py, pz] of pose) {
    x += px;
    y += py;
    z += pz;
  }
  const n = Math.max(pose.length, 1);
  return [x / n, y / n, z / n];
}

export function boundingRadius(pose: number[][]): number {
  const [cx, cy, cz] = centroid(pose);
  let r = 0;
  for (const [x, y, z] of pose) {
    r = Math.max(r, Math.hypot(x - cx, y - cy, z - cz));
  }
  return Math.max(r, 0.25);
}

/** Pairs of joint indices (child, parent) to draw as bones. */
export function boneIndexPairs(joints: JointDef[]): [number, number][] {
  const pairs: [number, number][] = [];
  joints.forEach((joint, i) => {
    if (joint.parent !== null) pairs.push([i, joint.parent]);
  });
  return pairs;
}

export function boneSegments(
  joints: JointDef[],
  pose: number[][],
): [number[], number[]][] {
  return boneIndexPairs(joints).map(([child, parent]) => [
    pose[child],
    pose[parent],
  ]);
}

export interface OrbitState {
  azimuthRad: number;
  elevationRad: number;
  zoom: number;
}

/**
 * Camera placement for the preset viewpoints relative to the skeleton:
 * top looks straight down the vertical axis at the centroid, bottom straight
 * up, left/right along the horizontal x axis; "free" orbits by azimuth and
 * elevation with zoom.
 */
export function cameraForViewpoint(
  viewpoint: Viewpoint,
  pose: number[][],
  orbit: OrbitState = { azimuthRad: 0.6, elevationRad: 0.35, zoom: 1 },
): CameraPose {
  const target = centroid(pose);
  const d = boundingRadius(pose) * 2.6;
  const [cx, cy, cz] = target;
  switch (viewpoint) {
    case "top":
      return { position: [cx, cy + d, cz], target, up: [0, 0, -1] };
    case "bottom":
      return { position: [cx, cy - d, cz], target, up: [0, 0, 1] };
    case "left":
      return { position: [cx - d, cy, cz], target, up: [0, 1, 0] };
    case "right":
      return { position: [cx + d, cy, cz], target, up: [0, 1, 0] };
    case "free": {
      const r = d / Math.max(orbit.zoom, 0.05);
      const y = r * Math.sin(orbit.elevationRad);
      const horizontal = r * Math.cos(orbit.elevationRad);
      return {
        position: [
          cx + horizontal * Math.sin(orbit.azimuthRad),
          cy + y,
          cz + horizontal * Math.cos(orbit.azimuthRad),
        ],
        target,
        up: [0, 1, 0],
      };
    }
  }
}

/** Direction the camera looks along, normalized. */
export function viewDirection(pose: CameraPose): [number, number, number] {
  const dx = pose.target[0] - pose.position[0];
  const dy = pose.target[1] - pose.position[1];
  const dz = pose.target[2] - pose.position[2];
  const len = Math.hypot(dx, dy, dz) || 1;
  return [dx / len, dy / len, dz / len];
}
