/**
 * Live wiring check against the real service: a scripted replay feeds frames
 * over the socket and the thin client's rendered cursor path must equal the
 * server's cursor-moved payloads, at an update rate of at least 15 Hz.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import net from "node:net";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ThinClient, type LineTransport } from "../src/client.js";
import type { EventMessage } from "../src/protocol.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const support = path.join(here, "support");

let workdir: string;
let server: ChildProcess;
let port: number;

function tcpTransport(portNum: number): Promise<LineTransport> {
  return new Promise((resolve, reject) => {
    const socket = net.createConnection({ host: "127.0.0.1", port: portNum });
    socket.setEncoding("utf8");
    socket.once("error", reject);
    socket.once("connect", () => {
      resolve({
        send: (line) => socket.write(line),
        onData: (handler) => socket.on("data", handler),
        onClose: (handler) => socket.on("close", handler),
        close: () => socket.end(),
      });
    });
  });
}

function until(cond: () => boolean, ms: number): Promise<void> {
  return new Promise((resolve, reject) => {
    const start = Date.now();
    const timer = setInterval(() => {
      if (cond()) {
        clearInterval(timer);
        resolve();
      } else if (Date.now() - start > ms) {
        clearInterval(timer);
        reject(new Error("timed out waiting for condition"));
      }
    }, 5);
  });
}

beforeAll(async () => {
  workdir = mkdtempSync(path.join(os.tmpdir(), "posespace-ui-"));
  execFileSync("python3", [path.join(support, "make_fixtures.py"), workdir], {
    timeout: 110_000,
  });
  server = spawn("python3", [
    path.join(support, "run_server.py"),
    path.join(workdir, "model.json"),
    path.join(workdir, "space.json"),
  ]);
  port = await new Promise<number>((resolve, reject) => {
    let buffer = "";
    server.stdout!.setEncoding("utf8");
    server.stdout!.on("data", (chunk: string) => {
      buffer += chunk;
      const match = buffer.match(/PORT (\d+)/);
      if (match) resolve(Number(match[1]));
    });
    server.once("exit", (code) => reject(new Error(`server exited: ${code}`)));
    setTimeout(() => reject(new Error("server start timeout")), 30_000);
  });
});

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("thin client against the live service", () => {
  it("renders exactly the server's cursor payloads at >= 15 Hz", async () => {
    const client = new ThinClient();
    client.attach(await tcpTransport(port));
    await until(() => client.view.connected, 10_000);
    expect(client.view.tracks).toHaveLength(240);

    const frames = readFileSync(path.join(workdir, "stream.ndjson"), "utf8")
      .split("\n")
      .filter((l) => l.trim())
      .map((l) => JSON.parse(l) as { t: number; hand: number[][]; source: string });

    // Replay at 30 frames/s, the capture rate the stream was recorded at.
    const started = Date.now();
    for (const frame of frames) {
      client.sendFrame(frame.t, frame.hand, frame.source);
      await new Promise((r) => setTimeout(r, 1000 / 30));
    }
    const elapsedS = (Date.now() - started) / 1000;

    const serverCursorPayloads = client.messageLog
      .filter((m): m is EventMessage => m.type === "event")
      .map((m) => m.event)
      .filter((e) => e.type === "cursor-moved");
    expect(serverCursorPayloads.length).toBeGreaterThan(20);

    // Thin-client property: the rendered cursor is always the latest payload,
    // and the trail is exactly the logged payload path (capped at 150).
    const logged = serverCursorPayloads.map((e) => e.music_xy as [number, number]);
    expect(client.view.cursor?.musicXy).toEqual(logged[logged.length - 1]);
    expect(client.view.trail).toEqual(logged.slice(-150));

    const updateRateHz = serverCursorPayloads.length / elapsedS;
    expect(updateRateHz).toBeGreaterThanOrEqual(15);

    // The pinch that opened the exploration was flashed and flipped the mode.
    expect(client.view.mode).toBe("EXPLORING");
    const modes = client.messageLog
      .filter((m): m is EventMessage => m.type === "event")
      .map((m) => m.event)
      .filter((e) => e.type === "mode-changed");
    expect(modes).toHaveLength(1);

    client.close();
  });

  it("each connection gets its own snapshot-first session", async () => {
    const a = new ThinClient();
    const b = new ThinClient();
    a.attach(await tcpTransport(port));
    b.attach(await tcpTransport(port));
    await until(() => a.view.connected && b.view.connected, 10_000);
    expect(a.messageLog[0].type).toBe("state-snapshot");
    expect(b.messageLog[0].type).toBe("state-snapshot");
    expect(b.view.mode).toBe("IDLE"); // untouched by the other session
    a.close();
    b.close();
  });
});
