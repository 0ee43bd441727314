/**
 * Client-side session log, in the same JSONL shape the engine reads.
 *
 * Recording everything the capture layer emits means a saved log replayed
 * through the headless CLI reproduces exactly what the live engine did.
 */

import { SessionEventJson } from "./protocol.js";

export class LogRecorder {
  private events: SessionEventJson[] = [];

  record(event: SessionEventJson): void {
    this.events.push(event);
  }

  get count(): number {
    return this.events.length;
  }

  toLog(sceneSha256: string, configSha256: string): string {
    const header = {
      format: "squidget-log",
      version: 1,
      scene_sha256: sceneSha256,
      config_sha256: configSha256,
    };
    const lines = [JSON.stringify(header)];
    for (const event of this.events) lines.push(JSON.stringify(event));
    return lines.join("\n") + "\n";
  }
}
