// Annotation state machine: role selection, point placement and submission.
// Pure of DOM concerns so it can be tested headlessly; main.ts wires it to
// the canvas and the widgets.

import { ApiClient, ApiError } from "./api.js";
import type {
  KeypointPayload,
  RoleName,
  SceneDetail,
  TaskSchemaPayload,
  ViolationPayload,
} from "./types.js";
import { ROLE_ORDER } from "./types.js";

export type SubmitOutcome = "saved" | "invalid" | "conflict" | "error";

export class AnnotateController {
  readonly placed = new Map<RoleName, KeypointPayload>();
  activeRole: RoleName | null = null;
  activeObject = 0;
  violations: ViolationPayload[] = [];
  dirty = false;
  version: number;

  constructor(
    readonly scene: SceneDetail,
    readonly schema: TaskSchemaPayload,
  ) {
    this.version = scene.version;
    for (const [role, payload] of Object.entries(scene.keypoints)) {
      this.placed.set(role as RoleName, { ...payload });
    }
    this.activeRole = this.nextMissingRole();
  }

  get requiredRoles(): RoleName[] {
    return ROLE_ORDER.filter((role) => this.schema.required_roles.includes(role));
  }

  nextMissingRole(): RoleName | null {
    for (const role of this.requiredRoles) {
      if (!this.placed.has(role)) return role;
    }
    return null;
  }

  selectRole(role: RoleName): void {
    if (!this.requiredRoles.includes(role)) return;
    this.activeRole = role;
  }

  selectObject(index: number): void {
    if (index >= 0 && index < this.scene.objects.length) {
      this.activeObject = index;
    }
  }

  /** Place the active role at image coordinates; advances to the next
   * missing role. Out-of-frame clicks are ignored (nothing to bind). */
  placeAt(x: number, y: number): boolean {
    if (this.activeRole === null) return false;
    if (x < 0 || y < 0 || x >= this.scene.width || y >= this.scene.height) return false;
    this.placed.set(this.activeRole, { x, y, object_index: this.activeObject });
    this.dirty = true;
    this.violations = [];
    this.activeRole = this.nextMissingRole() ?? this.activeRole;
    return true;
  }

  clearRole(role: RoleName): void {
    if (this.placed.delete(role)) {
      this.dirty = true;
      this.activeRole = role;
    }
  }

  get complete(): boolean {
    return this.requiredRoles.every((role) => this.placed.has(role));
  }

  get canSubmit(): boolean {
    return this.complete && this.dirty;
  }

  payload(): Record<string, KeypointPayload> {
    const out: Record<string, KeypointPayload> = {};
    for (const [role, point] of this.placed) {
      out[role] = { ...point };
    }
    return out;
  }

  /** Submit through the API; the server is the validation authority. */
  async submit(api: ApiClient): Promise<SubmitOutcome> {
    if (!this.complete) return "invalid";
    try {
      const result = await api.putKeypoints(
        this.scene.record_id,
        this.version,
        this.payload(),
      );
      this.version = result.version;
      this.dirty = false;
      this.violations = [];
      return "saved";
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 400) {
          this.violations = err.violations;
          return "invalid";
        }
        if (err.status === 409) {
          const current = err.currentVersion;
          if (current !== null) this.version = current;
          this.violations = [
            {
              code: "version_conflict",
              message: "someone else edited this scene; review and resubmit",
            },
          ];
          return "conflict";
        }
      }
      this.violations = [
        { code: "request_failed", message: err instanceof Error ? err.message : String(err) },
      ];
      return "error";
    }
  }

  /** Roles whose server-side violations should highlight their markers. */
  violatedRoles(): Set<RoleName> {
    const out = new Set<RoleName>();
    for (const violation of this.violations) {
      if (violation.role && ROLE_ORDER.includes(violation.role as RoleName)) {
        out.add(violation.role as RoleName);
      }
    }
    return out;
  }
}
