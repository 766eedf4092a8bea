// Shared wire types for the annotation REST API, plus the fixed role palette.

export type RoleName = "grasp" | "function" | "target" | "pre_contact" | "post_contact";

export const ROLE_ORDER: RoleName[] = [
  "grasp",
  "function",
  "target",
  "pre_contact",
  "post_contact",
];

// Fixed, documented palette: one color per role everywhere in the UI.
export const ROLE_COLORS: Record<RoleName, string> = {
  grasp: "#ff4545",
  function: "#ffaa00",
  target: "#3ecb3e",
  pre_contact: "#4a86ff",
  post_contact: "#c95bff",
};

export interface KeypointPayload {
  x: number;
  y: number;
  object_index: number;
}

export type ReviewState = "pending" | "accepted" | "rejected";

export interface SceneSummary {
  record_id: string;
  task_id: string;
  kind: "human" | "synthetic";
  parent_id: string | null;
  object_set: string | null;
  instruction: string;
  objects: string[];
  keypoints: Record<string, KeypointPayload>;
  annotated: boolean;
  version: number;
  review: ReviewState;
}

export interface SceneDetail extends SceneSummary {
  width: number;
  height: number;
}

export interface SceneList {
  total: number;
  page: number;
  page_size: number;
  scenes: SceneSummary[];
}

export interface TaskSchemaPayload {
  task_id: string;
  instruction_template: string;
  required_roles: RoleName[];
  gripper_height_mode: Record<string, unknown>;
  gripper_orientation_mode: Record<string, unknown>;
}

export interface ViolationPayload {
  code: string;
  message: string;
  role?: string;
  object_index?: number;
}

export type ContextKindName = "soft_edge" | "depth" | "seg_mask";
