/**
 * Engine connection: sends sequenced messages, pairs replies by number.
 *
 * The socket is duck-typed so tests can drive the client with the `ws`
 * package or a fake while the browser uses the native WebSocket.
 */

import {
  Effect,
  HelloMessage,
  Inbound,
  Sequencer,
  SessionEventJson,
  Snapshot,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "message", handler: (ev: { data: unknown }) => void): void;
}

type Resolver = { resolve: (msg: Inbound) => void; reject: (err: Error) => void };

export class EngineClient {
  private outSeq = new Sequencer();
  private pending = new Map<number, Resolver>();
  private helloResolvers: ((hello: HelloMessage["hello"]) => void)[] = [];
  hello: HelloMessage["hello"] | null = null;

  constructor(private socket: SocketLike) {
    socket.addEventListener("message", (ev) => this.onMessage(String(ev.data)));
  }

  private onMessage(data: string): void {
    const message = JSON.parse(data) as Inbound;
    if ("hello" in message) {
      this.hello = message.hello;
      for (const resolve of this.helloResolvers.splice(0)) resolve(message.hello);
      return;
    }
    const waiter = this.pending.get(message.seq);
    if (!waiter) return;
    this.pending.delete(message.seq);
    if ("error" in message) waiter.reject(new Error(message.error));
    else waiter.resolve(message);
  }

  ready(): Promise<HelloMessage["hello"]> {
    if (this.hello) return Promise.resolve(this.hello);
    return new Promise((resolve) => this.helloResolvers.push(resolve));
  }

  private roundTrip(payload: Record<string, unknown>): Promise<Inbound> {
    const seq = this.outSeq.next();
    return new Promise((resolve, reject) => {
      this.pending.set(seq, { resolve, reject });
      this.socket.send(JSON.stringify({ seq, ...payload }));
    });
  }

  async sendEvent(event: SessionEventJson): Promise<Effect[]> {
    const reply = await this.roundTrip({ event });
    return "effects" in reply ? reply.effects : [];
  }

  async requestSnapshot(): Promise<Snapshot> {
    const reply = await this.roundTrip({ request: "snapshot" });
    if (!("snapshot" in reply)) throw new Error("snapshot reply missing");
    return reply.snapshot;
  }

  async requestDocument(): Promise<string> {
    const reply = await this.roundTrip({ request: "document" });
    if (!("document" in reply)) throw new Error("document reply missing");
    return reply.document;
  }

  async undo(): Promise<Effect[]> {
    const reply = await this.roundTrip({ request: "undo" });
    return "effects" in reply ? reply.effects : [];
  }

  async redo(): Promise<Effect[]> {
    const reply = await this.roundTrip({ request: "redo" });
    return "effects" in reply ? reply.effects : [];
  }

  close(): void {
    this.socket.close();
  }
}
