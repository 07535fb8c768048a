/** Headless session controller: state transitions for the dispatcher page.
 *
 * Holds the latest service responses and the preview-then-commit flow,
 * including the conflict path (stale revision → refetch → re-preview).
 * The DOM layer only renders `state` and forwards events here.
 */

import {
  ApiClient,
  ConflictError,
  type CostsResponse,
  type InsertionResponse,
  type ScheduleSnapshot,
  type TaskForm,
} from "./api.js";

export interface ControllerState {
  sessionId: string | null;
  revision: number;
  schedule: ScheduleSnapshot | null;
  costs: CostsResponse | null;
  preview: InsertionResponse | null;
  pendingForm: TaskForm | null;
  formError: string | null;
  banner: string | null;
}

function initialState(): ControllerState {
  return {
    sessionId: null,
    revision: 0,
    schedule: null,
    costs: null,
    preview: null,
    pendingForm: null,
    formError: null,
    banner: null,
  };
}

export class SessionController {
  state: ControllerState = initialState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ControllerState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  async createSession(scenario: unknown): Promise<void> {
    this.state = initialState();
    try {
      const summary = await this.api.createSession(scenario);
      this.state.sessionId = summary.id;
      await this.refresh();
    } catch (err) {
      this.state.banner = describe(err);
      this.emit();
      throw err;
    }
  }

  async createSessionFromText(text: string): Promise<void> {
    let scenario: unknown;
    try {
      scenario = JSON.parse(text);
    } catch {
      this.state.banner = "scenario is not valid JSON";
      this.emit();
      return;
    }
    await this.createSession(scenario);
  }

  async refresh(): Promise<void> {
    const sid = this.state.sessionId;
    if (!sid) return;
    try {
      const [schedule, costs] = await Promise.all([
        this.api.getSchedule(sid),
        this.api.getCosts(sid),
      ]);
      const revisionMoved = schedule.revision !== this.state.revision;
      this.state.schedule = schedule;
      this.state.costs = costs;
      this.state.revision = schedule.revision;
      if (revisionMoved) this.state.preview = null;
      this.state.banner = null;
    } catch (err) {
      this.state.banner = describe(err);
    }
    this.emit();
  }

  /** Client-side guard; the service re-validates everything. */
  validateForm(form: TaskForm): string | null {
    if (!Number.isInteger(form.duration_minutes)) {
      return "duration must be whole minutes";
    }
    if (form.duration_minutes <= 0) {
      return "duration must be positive";
    }
    return null;
  }

  async preview(form: TaskForm): Promise<InsertionResponse | null> {
    const sid = this.state.sessionId;
    if (!sid) return null;
    const problem = this.validateForm(form);
    if (problem) {
      this.state.formError = problem;
      this.state.preview = null;
      this.state.pendingForm = null;
      this.emit();
      return null;
    }
    try {
      const preview = await this.api.insertTask(
        sid,
        form,
        "preview",
        this.state.revision,
      );
      this.state.preview = preview;
      this.state.pendingForm = form;
      this.state.formError = null;
      this.emit();
      return preview;
    } catch (err) {
      if (err instanceof ConflictError) {
        await this.refresh();
        return this.preview(form);
      }
      this.state.formError = describe(err);
      this.state.preview = null;
      this.state.pendingForm = null;
      this.emit();
      return null;
    }
  }

  /** Commit the previewed task at the previewed revision.
   *
   * On a revision conflict the schedule changed under us: refetch,
   * re-preview the same form, and surface a banner instead of committing
   * a placement the dispatcher never saw.
   */
  async commit(): Promise<InsertionResponse | null> {
    const sid = this.state.sessionId;
    const form = this.state.pendingForm;
    const preview = this.state.preview;
    if (!sid || !form || !preview) return null;
    try {
      const committed = await this.api.insertTask(
        sid,
        form,
        "commit",
        preview.revision,
      );
      this.state.preview = null;
      this.state.pendingForm = null;
      await this.refresh();
      return committed;
    } catch (err) {
      if (err instanceof ConflictError) {
        await this.refresh();
        await this.preview(form);
        this.state.banner =
          "schedule changed while previewing; showing a fresh preview";
        this.emit();
        return null;
      }
      this.state.formError = describe(err);
      this.emit();
      return null;
    }
  }

  async undo(): Promise<void> {
    const sid = this.state.sessionId;
    if (!sid) return;
    try {
      await this.api.undo(sid);
    } catch (err) {
      this.state.banner = describe(err);
    }
    await this.refresh();
  }
}

function describe(err: unknown): string {
  if (err instanceof Error) return err.message;
  return String(err);
}
