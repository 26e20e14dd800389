import { spawn } from "node:child_process";
import net from "node:net";
import { once } from "node:events";
import { fileURLToPath } from "node:url";
import path from "node:path";
import { afterAll, describe, expect, it } from "vitest";
import { ReferenceEnv } from "../src/env.js";
import { serveTcp } from "../src/server.js";

const MAIN = path.join(
  path.dirname(fileURLToPath(import.meta.url)), "..", "dist", "main.js",
);

/** Drive a freshly spawned stdio server with a fixed script of lines. */
async function stdioExchange(lines: string[]): Promise<string[]> {
  const child = spawn(process.execPath, [MAIN], {
    stdio: ["pipe", "pipe", "inherit"],
  });
  let out = "";
  child.stdout.setEncoding("utf-8");
  child.stdout.on("data", (chunk: string) => {
    out += chunk;
  });
  child.stdin.write(lines.map((line) => line + "\n").join(""));
  child.stdin.end();
  const [code] = (await once(child, "exit")) as [number];
  expect(code).toBe(0);
  return out.split("\n").filter((line) => line !== "");
}

describe("stdio transport", () => {
  it("serves a hello/simulate/close conversation", async () => {
    const replies = await stdioExchange([
      '{"op": "hello"}',
      '{"op": "simulate", "input": [0.5, -0.5], "seed": 3}',
      '{"op": "close"}',
    ]);
    expect(replies.length).toBe(2);
    const hello = JSON.parse(replies[0]!);
    expect(hello.op).toBe("hello");
    expect(hello.name).toBe("REF");
    const trace = JSON.parse(replies[1]!);
    expect(trace.op).toBe("trace");
    expect(trace.time.length).toBe(301);
    expect(trace.signals.pos.length).toBe(301);
  });

  it("exits cleanly on EOF without a close op", async () => {
    const replies = await stdioExchange(['{"op": "hello"}']);
    expect(replies.length).toBe(1);
  });

  it("answers a burst of garbage with one error each, never crashing", async () => {
    const garbage = Array.from({ length: 50 }, (_, i) => `junk line ${i} }{`);
    const replies = await stdioExchange([...garbage, '{"op": "hello"}']);
    expect(replies.length).toBe(51);
    for (const line of replies.slice(0, 50)) {
      const reply = JSON.parse(line);
      expect(reply.op).toBe("error");
      expect(reply.kind).toBe("protocol");
    }
    expect(JSON.parse(replies[50]!).op).toBe("hello");
  });
});

describe("tcp transport", () => {
  const servers: net.Server[] = [];
  afterAll(() => {
    for (const server of servers) server.close();
  });

  async function connect(): Promise<{ socket: net.Socket; port: number }> {
    const server = await serveTcp(() => new ReferenceEnv(), 0);
    servers.push(server);
    const port = (server.address() as net.AddressInfo).port;
    const socket = net.createConnection({ host: "127.0.0.1", port });
    await once(socket, "connect");
    return { socket, port };
  }

  function ask(socket: net.Socket, line: string): Promise<string> {
    return new Promise((resolve) => {
      let buffer = "";
      const onData = (chunk: Buffer) => {
        buffer += chunk.toString("utf-8");
        const newline = buffer.indexOf("\n");
        if (newline >= 0) {
          socket.off("data", onData);
          resolve(buffer.slice(0, newline));
        }
      };
      socket.on("data", onData);
      socket.write(line + "\n");
    });
  }

  it("behaves identically to stdio", async () => {
    const { socket } = await connect();
    const hello = JSON.parse(await ask(socket, '{"op": "hello"}'));
    expect(hello.op).toBe("hello");
    expect(hello.episode_steps).toBe(300);
    const trace = JSON.parse(
      await ask(socket, '{"op": "simulate", "input": [0.25, 0.75], "seed": 1}'),
    );
    expect(trace.op).toBe("trace");
    expect(trace.signals.target[5]).toEqual([0.25, 0.75]);
    const error = JSON.parse(await ask(socket, "nonsense"));
    expect(error.op).toBe("error");
    socket.end();
  });

  it("close ends the connection but the listener survives", async () => {
    const server = await serveTcp(() => new ReferenceEnv(), 0);
    servers.push(server);
    const port = (server.address() as net.AddressInfo).port;

    const first = net.createConnection({ host: "127.0.0.1", port });
    await once(first, "connect");
    first.write('{"op": "close"}\n');
    await once(first, "close");

    const second = net.createConnection({ host: "127.0.0.1", port });
    await once(second, "connect");
    const reply = await new Promise<string>((resolve) => {
      second.once("data", (chunk) => resolve(chunk.toString("utf-8")));
      second.write('{"op": "hello"}\n');
    });
    expect(JSON.parse(reply.trim()).op).toBe("hello");
    second.end();
  });
});
