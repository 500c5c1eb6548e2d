// Session transport: REST for lifecycle and export, one WebSocket for
// commands. Reconnection resumes from GET state, so a dropped socket never
// loses the session.

import { commandText, parseServerMessage, type ErrorMessage, type StateMessage } from "./protocol.js";

/** Structural subset shared by browser WebSocket and the ws package. */
export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = "idle" | "connecting" | "open" | "closed";

export interface SessionHooks {
  onState(message: StateMessage): void;
  onServerError(message: ErrorMessage): void;
  onStatus(status: ConnectionStatus): void;
  onFault?(error: Error): void;
}

const RECONNECT_DELAY_MS = 1000;

function defaultFactory(url: string): SocketLike {
  const ctor = (globalThis as { WebSocket?: new (url: string) => SocketLike }).WebSocket;
  if (ctor === undefined) throw new Error("no WebSocket implementation available");
  return new ctor(url);
}

export class SessionClient {
  session: string | null = null;
  private seq = 0;
  private socket: SocketLike | null = null;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    readonly base: string,
    private readonly hooks: SessionHooks,
    private readonly factory: SocketFactory = defaultFactory,
  ) {}

  async createSession(taskYaml?: string): Promise<StateMessage> {
    const response = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(taskYaml === undefined ? {} : { task_yaml: taskYaml }),
    });
    const body = await response.json();
    if (response.status !== 201) {
      const detail = (body as { detail?: string; error?: string }) ?? {};
      throw new Error(detail.detail ?? detail.error ?? `session rejected (${response.status})`);
    }
    const message = parseServerMessage(JSON.stringify(body));
    if ("error" in message) throw new Error(message.error);
    this.session = message.session;
    return message;
  }

  /** Resume an existing session id (page reload path). */
  async resumeSession(id: string): Promise<StateMessage> {
    const message = await this.fetchState(id);
    this.session = id;
    return message;
  }

  private async fetchState(id: string): Promise<StateMessage> {
    const response = await fetch(`${this.base}/sessions/${id}/state`);
    if (!response.ok) throw new Error(`state fetch failed (${response.status})`);
    const message = parseServerMessage(await response.text());
    if ("error" in message) throw new Error(message.error);
    return message;
  }

  connect(): void {
    if (this.session === null) throw new Error("no session to connect");
    this.stopped = false;
    this.openSocket();
  }

  private wsUrl(): string {
    return `${this.base.replace(/^http/, "ws")}/session/${this.session}`;
  }

  private openSocket(): void {
    this.hooks.onStatus("connecting");
    const socket = this.factory(this.wsUrl());
    this.socket = socket;
    socket.onopen = () => this.hooks.onStatus("open");
    socket.onmessage = (ev) => this.handleFrame(String(ev.data));
    socket.onerror = () => undefined; // onclose always follows
    socket.onclose = () => {
      this.socket = null;
      this.hooks.onStatus("closed");
      if (!this.stopped) this.scheduleResume();
    };
  }

  private handleFrame(raw: string): void {
    let message: StateMessage | ErrorMessage;
    try {
      message = parseServerMessage(raw);
    } catch (error) {
      this.hooks.onFault?.(error as Error);
      return;
    }
    if ("error" in message) this.hooks.onServerError(message);
    else this.hooks.onState(message);
  }

  private scheduleResume(): void {
    if (this.timer !== null) return;
    this.timer = setTimeout(() => {
      this.timer = null;
      if (this.stopped || this.session === null) return;
      this.fetchState(this.session)
        .then((message) => {
          this.hooks.onState(message);
          this.openSocket();
        })
        .catch(() => this.scheduleResume());
    }, RECONNECT_DELAY_MS);
  }

  /** Send one command; returns its sequence number. */
  send(command: string): number {
    if (this.socket === null) throw new Error("socket not open");
    const seq = ++this.seq;
    this.socket.send(commandText(command, seq));
    return seq;
  }

  async fetchPlan(): Promise<string> {
    if (this.session === null) throw new Error("no session");
    const response = await fetch(`${this.base}/sessions/${this.session}/plan`);
    if (!response.ok) throw new Error(`plan fetch failed (${response.status})`);
    return response.text();
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.socket?.close();
    this.socket = null;
  }
}
