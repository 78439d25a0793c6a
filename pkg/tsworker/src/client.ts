/**
 * Worker-side view of the cluster: one socket to the head, blocking-style
 * frame exchange built on promises, and the worker half of each collective.
 */

import net from "node:net";
import {
  Frame,
  MsgType,
  NO_RANK,
  Payload,
  Truncated,
  decodeFrame,
  empty,
  encodeFrame,
} from "./protocol.js";

export const TAG_BCAST = 0xffff0001;
export const TAG_REDUCE = 0xffff0002;
export const TAG_GATHER = 0xffff0003;

export class HeadClosed extends Error {}
export class ProtocolViolation extends Error {}

export class FrameSocket {
  private buf: Buffer = Buffer.alloc(0);
  private pending: Frame[] = [];
  private waiter: { resolve: (f: Frame) => void; reject: (e: Error) => void } | null = null;
  private eof: Error | null = null;

  constructor(private sock: net.Socket) {
    sock.on("data", (chunk) => this.onData(chunk));
    sock.on("error", (err) => this.onEnd(new HeadClosed(err.message)));
    sock.on("close", () => this.onEnd(new HeadClosed("connection closed")));
  }

  private onData(chunk: Buffer): void {
    this.buf = this.buf.length ? Buffer.concat([this.buf, chunk]) : chunk;
    for (;;) {
      let frame: Frame;
      let consumed: number;
      try {
        [frame, consumed] = decodeFrame(this.buf);
      } catch (err) {
        if (err instanceof Truncated) return;
        this.onEnd(err as Error);
        return;
      }
      this.buf = this.buf.subarray(consumed);
      if (this.waiter) {
        const { resolve } = this.waiter;
        this.waiter = null;
        resolve(frame);
      } else {
        this.pending.push(frame);
      }
    }
  }

  private onEnd(err: Error): void {
    if (this.eof) return;
    this.eof = err;
    if (this.waiter) {
      const { reject } = this.waiter;
      this.waiter = null;
      reject(err);
    }
  }

  read(): Promise<Frame> {
    if (this.pending.length) return Promise.resolve(this.pending.shift()!);
    if (this.eof) return Promise.reject(this.eof);
    return new Promise((resolve, reject) => {
      this.waiter = { resolve, reject };
    });
  }

  write(frame: Frame): void {
    this.sock.write(encodeFrame(frame));
  }

  destroy(): void {
    this.sock.destroy();
  }
}

export class WorkerWorld {
  /** Inbound SENDs not yet claimed by a recv filter. */
  private inbox: Frame[] = [];
  shutdownSeen = false;

  constructor(
    public readonly myRank: number,
    public readonly worldSize: number,
    private readonly link: FrameSocket,
  ) {}

  send(dest: number, tag: number, payload: Payload): void {
    this.link.write({ msgType: MsgType.SEND, source: this.myRank, dest, tag, payload });
  }

  sendError(message: string): void {
    this.link.write({
      msgType: MsgType.ERROR,
      source: this.myRank,
      dest: NO_RANK,
      tag: 0,
      payload: { kind: 1, data: Buffer.from(message, "utf-8") } as Payload,
    });
  }

  /** Oldest queued SEND matching (source, tag); others stay queued. */
  async recv(source: number, tag: number): Promise<Frame> {
    const idx = this.inbox.findIndex((f) => f.source === source && f.tag === tag);
    if (idx >= 0) return this.inbox.splice(idx, 1)[0];
    for (;;) {
      const frame = await this.link.read();
      if (frame.msgType === MsgType.SEND) {
        if (frame.source === source && frame.tag === tag) return frame;
        this.inbox.push(frame);
      } else if (frame.msgType === MsgType.SHUTDOWN) {
        this.shutdownSeen = true;
        throw new HeadClosed("world has shut down");
      } else {
        throw new ProtocolViolation(`unexpected ${MsgType[frame.msgType]} while receiving`);
      }
    }
  }

  async barrier(): Promise<void> {
    this.link.write({
      msgType: MsgType.BARRIER,
      source: this.myRank,
      dest: NO_RANK,
      tag: 0,
      payload: empty(),
    });
    for (;;) {
      const frame = await this.link.read();
      if (frame.msgType === MsgType.BARRIER_RELEASE) return;
      if (frame.msgType === MsgType.SEND) {
        this.inbox.push(frame);
      } else if (frame.msgType === MsgType.SHUTDOWN) {
        this.shutdownSeen = true;
        throw new HeadClosed("world has shut down");
      } else {
        throw new ProtocolViolation(`unexpected ${MsgType[frame.msgType]} in barrier`);
      }
    }
  }

  /** Worker side of broadcast: the root's payload arrives as a tagged SEND. */
  async broadcastRecv(root: number): Promise<Payload> {
    return (await this.recv(root, TAG_BCAST)).payload;
  }

  reduceContribute(root: number, payload: Payload): void {
    this.send(root, TAG_REDUCE, payload);
  }

  gatherContribute(root: number, payload: Payload): void {
    this.send(root, TAG_GATHER, payload);
  }

  async awaitShutdown(): Promise<void> {
    if (this.shutdownSeen) return;
    for (;;) {
      let frame: Frame;
      try {
        frame = await this.link.read();
      } catch {
        return; // link dropped; nothing left to wait for
      }
      if (frame.msgType === MsgType.SHUTDOWN) {
        this.shutdownSeen = true;
        return;
      }
    }
  }

  close(): void {
    this.link.destroy();
  }
}

export async function workerJoin(host: string, port: number, timeoutMs = 30000): Promise<WorkerWorld> {
  const sock = await connectWithRetry(host, port, timeoutMs);
  sock.setNoDelay(true);
  const link = new FrameSocket(sock);
  link.write({ msgType: MsgType.HELLO, source: NO_RANK, dest: NO_RANK, tag: 0, payload: empty() });
  const welcome = await link.read();
  if (welcome.msgType !== MsgType.WELCOME) {
    throw new ProtocolViolation(`expected WELCOME, got ${MsgType[welcome.msgType]}`);
  }
  if (welcome.payload.kind !== 2) throw new ProtocolViolation("WELCOME payload kind");
  const [rank, size] = welcome.payload.values;
  const start = await link.read();
  if (start.msgType !== MsgType.START) {
    throw new ProtocolViolation(`expected START, got ${MsgType[start.msgType]}`);
  }
  return new WorkerWorld(Number(rank), Number(size), link);
}

function connectWithRetry(host: string, port: number, timeoutMs: number): Promise<net.Socket> {
  const deadline = Date.now() + timeoutMs;
  return new Promise((resolve, reject) => {
    const attempt = () => {
      const sock = net.connect(port, host);
      sock.once("connect", () => {
        sock.removeAllListeners("error");
        resolve(sock);
      });
      sock.once("error", (err) => {
        sock.destroy();
        if (Date.now() > deadline) reject(new HeadClosed(`head unreachable: ${err.message}`));
        else setTimeout(attempt, 50);
      });
    };
    attempt();
  });
}
