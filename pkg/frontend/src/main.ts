// Application wiring: fetch the manifest, drive the renderer from the
// interaction state, run task sessions and upload the recorded traces.

import { SceneClient } from "./api.js";
import { TiltController, grabStart, grabUpdate, controllerFromDrag, type GrabState } from "./interaction.js";
import { sideBySideLayout, toggleStep, toggleView, type ModeKind, type ToggleState } from "./modes.js";
import { IDENTITY, quatFromAxisAngle, tiltAngleDeg, type Pose } from "./quat.js";
import { Renderer } from "./render.js";
import { TaskRunner } from "./taskRunner.js";
import { uploadWithRetry } from "./recorder.js";
import { VIEW_CLASS_OF_PHASE, type Manifest, type SceneFile } from "./types.js";

const TOGGLE_TILTS: Record<string, number> = { choropleth: 0, prism: 45, barChart: 90 };

class App {
  client = new SceneClient("");
  manifest!: Manifest;
  renderer!: Renderer;
  tilt = new TiltController();
  mode: ModeKind = "tiltMap";
  toggle: ToggleState = { index: 0 };
  layer = "";
  mapPose: Pose = { position: [0, 0.8, -0.6], orientation: [0, 0, 0, 1] };
  grab: GrabState | null = null;
  runner: TaskRunner | null = null;
  lastScene: SceneFile | null = null;
  private fetching = false;
  private pendingTilt: number | null = null;

  async start(): Promise<void> {
    this.manifest = await this.client.manifest();
    this.layer = this.manifest.defaultLayer;
    const canvas = document.getElementById("view") as HTMLCanvasElement;
    this.renderer = new Renderer(canvas);
    this.bindUi(canvas);
    await this.refreshScene(0);
    const loop = () => {
      this.renderer.render();
      this.sampleTrace();
      requestAnimationFrame(loop);
    };
    requestAnimationFrame(loop);
  }

  private bindUi(canvas: HTMLCanvasElement): void {
    const tiltSlider = document.getElementById("tilt") as HTMLInputElement;
    tiltSlider.addEventListener("input", () => {
      void this.requestTilt(Number(tiltSlider.value));
    });

    let dragging = false;
    let grabbing = false;
    let lastX = 0;
    let lastY = 0;
    canvas.addEventListener("pointerdown", (ev) => {
      dragging = true;
      grabbing = ev.button === 0 && ev.shiftKey;
      if (grabbing) this.grab = grabStart(IDENTITY, this.mapPose);
      lastX = ev.clientX;
      lastY = ev.clientY;
      canvas.setPointerCapture(ev.pointerId);
    });
    canvas.addEventListener("pointerup", () => {
      dragging = false;
      this.grab = null;
    });
    canvas.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      const dx = ev.clientX - lastX;
      const dy = ev.clientY - lastY;
      lastX = ev.clientX;
      lastY = ev.clientY;
      if (this.grab) {
        // latched rigid follow of the pointer-derived controller
        this.mapPose = grabUpdate(this.grab, controllerFromDrag(dx, dy));
        void this.requestTilt(tiltAngleDeg(this.mapPose));
      } else {
        this.tilt.orbitBy(dx);
        void this.requestTilt(this.tilt.tiltDeg + dy * 0.25);
      }
      tiltSlider.value = String(Math.round(this.tilt.tiltDeg));
    });

    window.addEventListener("keydown", (ev) => {
      if (this.mode !== "toggle") return;
      if (ev.key === "ArrowRight") this.toggle = toggleStep(this.toggle, 1);
      else if (ev.key === "ArrowLeft") this.toggle = toggleStep(this.toggle, -1);
      else return;
      void this.requestTilt(TOGGLE_TILTS[toggleView(this.toggle)]);
    });

    (document.getElementById("mode") as HTMLSelectElement).addEventListener("change", (ev) => {
      this.mode = (ev.target as HTMLSelectElement).value as ModeKind;
      if (this.mode === "sideBySide") {
        const eye: Pose = { position: [0, 1.6, 0.8], orientation: [0, 0, 0, 1] };
        console.info("side-by-side poses", sideBySideLayout(eye));
      }
      void this.requestTilt(0);
    });

    (document.getElementById("start-tasks") as HTMLButtonElement).addEventListener("click", () => {
      void this.startTasks();
    });
    const answer = document.getElementById("answer") as HTMLInputElement;
    answer.addEventListener("input", () => {
      this.runner?.setSlider(Number(answer.value));
      (document.getElementById("answer-value") as HTMLElement).textContent = answer.value;
    });
    (document.getElementById("confirm") as HTMLButtonElement).addEventListener("click", () => {
      void this.confirmAnswer();
    });
  }

  private async requestTilt(target: number): Promise<void> {
    // frame-to-frame tilt steps are clamped so displayed geometry never
    // jumps farther than the engine's continuity bound
    this.pendingTilt = target;
    if (this.fetching) return;
    this.fetching = true;
    try {
      while (this.pendingTilt !== null) {
        const want = this.pendingTilt;
        const applied = this.tilt.tiltTo(want);
        if (applied === this.pendingTilt) this.pendingTilt = null;
        await this.refreshScene(applied);
      }
    } finally {
      this.fetching = false;
    }
  }

  private async refreshScene(tilt: number): Promise<void> {
    const fetched = await this.client.scene(tilt, this.tilt.azimuthDeg, this.layer);
    this.lastScene = fetched.scene;
    this.renderer.showScene(fetched.scene, this.runner?.highlightTargets ?? []);
    this.runner?.notifyFirstRender();
    (document.getElementById("phase") as HTMLElement).textContent =
      `phase ${fetched.scene.phase} / tilt ${fetched.scene.tiltDeg.toFixed(1)}`;
  }

  private sampleTrace(): void {
    if (!this.runner || !this.lastScene) return;
    const cam = this.renderer.camera;
    const head: Pose = {
      position: [cam.position.x, cam.position.y, cam.position.z],
      orientation: [cam.quaternion.x, cam.quaternion.y, cam.quaternion.z, cam.quaternion.w],
    };
    const mapTilt = quatFromAxisAngle([1, 0, 0], -this.tilt.tiltDeg);
    this.runner.sample({
      head,
      controller: IDENTITY,
      map: { position: this.mapPose.position, orientation: mapTilt },
      view: VIEW_CLASS_OF_PHASE[this.lastScene.phase],
    });
  }

  private async startTasks(): Promise<void> {
    const tasksPath = this.manifest.files["tasks.json"];
    if (!tasksPath) return;
    const tasks = await this.client.tasks(tasksPath);
    this.runner = new TaskRunner(tasks, () => performance.now() / 1000);
    this.runner.startSession();
    await this.presentCurrentTask();
  }

  private async presentCurrentTask(): Promise<void> {
    const task = this.runner?.currentTask;
    if (!task) return;
    const layerName = task.layerfile.replace(/\.layer\.json$/, "").replace(/\.json$/, "");
    if (this.manifest.layers.includes(layerName)) this.layer = layerName;
    (document.getElementById("task-info") as HTMLElement).textContent =
      `${task.kind}: ${task.targets.join(", ")}`;
    await this.refreshScene(this.tilt.tiltDeg);
  }

  private async confirmAnswer(): Promise<void> {
    if (!this.runner || this.runner.phase !== "answering") return;
    const phase = this.runner.confirm();
    if (phase === "done") {
      const { trace, answers } = this.runner.finish();
      const stamp = `session-${this.runner.tasks.length}tasks`;
      const persist = (name: string, body: string) => localStorage.setItem(name, body);
      await uploadWithRetry(this.client, "traces", `${stamp}.jsonl`, trace, persist);
      await uploadWithRetry(this.client, "answers", `${stamp}.json`, answers, persist);
      (document.getElementById("task-info") as HTMLElement).textContent = "session uploaded";
      this.runner = null;
    } else {
      await this.presentCurrentTask();
    }
  }
}

new App().start().catch((err) => {
  document.body.insertAdjacentText("beforeend", `failed to start: ${err}`);
});
