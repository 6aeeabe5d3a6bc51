// Task session state machine: presents tasks one by one, times from the
// first rendered frame to answer confirmation, collects the 0-100 integer
// slider answer and records the 10 Hz trace throughout.

import type { AnswerRec, TaskRec } from "./types.js";
import { TraceRecorder, type PoseSources } from "./recorder.js";

export type RunnerPhase = "idle" | "presenting" | "answering" | "done";

export class TaskRunner {
  readonly answers: AnswerRec[] = [];
  readonly recorder: TraceRecorder;
  phase: RunnerPhase = "idle";
  current = -1;
  slider = 50;
  private tStart = 0;

  constructor(
    readonly tasks: TaskRec[],
    private now: () => number,
  ) {
    this.recorder = new TraceRecorder(now);
  }

  get currentTask(): TaskRec | null {
    return this.current >= 0 && this.current < this.tasks.length ? this.tasks[this.current] : null;
  }

  /** Area ids the renderer must highlight (leader lines for comparisons,
   * thick region borders for regions). */
  get highlightTargets(): string[] {
    return this.currentTask?.targets ?? [];
  }

  startSession(): void {
    if (this.tasks.length === 0) {
      this.phase = "done";
      return;
    }
    this.recorder.start();
    this.current = 0;
    this.phase = "presenting";
  }

  /** Called by the renderer when the first frame of the current task is on
   * screen; starts this task's clock. */
  notifyFirstRender(): void {
    if (this.phase !== "presenting") return;
    this.tStart = this.recorder.elapsed();
    this.phase = "answering";
  }

  sample(sources: PoseSources): void {
    if (this.phase === "answering" || this.phase === "presenting") {
      this.recorder.maybeSample(sources);
    }
  }

  setSlider(value: number): void {
    const v = Math.round(value);
    if (v < 0 || v > 100) throw new Error(`slider out of range: ${value}`);
    this.slider = v;
  }

  /** Confirm the current slider value (the double-click equivalent);
   * returns the phase the runner lands in. */
  confirm(): RunnerPhase {
    if (this.phase !== "answering") throw new Error(`cannot confirm in phase ${this.phase}`);
    this.answers.push({
      task: this.current,
      answer: this.slider,
      tStart: this.tStart,
      tEnd: this.recorder.elapsed(),
    });
    this.slider = 50;
    if (this.current + 1 < this.tasks.length) {
      this.current += 1;
      this.phase = "presenting";
    } else {
      this.phase = "done";
    }
    return this.phase;
  }

  /** JSONL tracefile + answers document, available once done. */
  finish(): { trace: string; answers: string } {
    if (this.phase !== "done") throw new Error("session not finished");
    return {
      trace: this.recorder.stop(),
      answers: JSON.stringify({ answers: this.answers }),
    };
  }
}
