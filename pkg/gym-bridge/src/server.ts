/**
 * Transports. Both run the same Session per connection, so behavior over
 * stdio pipes and TCP sockets is identical; the server is single-threaded
 * per connection and serves requests strictly in order.
 */

import net from "node:net";
import { createInterface } from "node:readline";
import type { EnvFactory } from "./env.js";
import { Session } from "./session.js";

/** Serve one session over stdin/stdout; resolves on close op or EOF. */
export function serveStdio(factory: EnvFactory): Promise<void> {
  return new Promise((resolve) => {
    const session = new Session(factory());
    const rl = createInterface({ input: process.stdin, terminal: false });
    rl.on("line", (line) => {
      const replies = session.handleLine(line);
      if (replies === null) {
        rl.close();
        return;
      }
      for (const reply of replies) {
        process.stdout.write(reply + "\n");
      }
    });
    rl.on("close", () => resolve());
  });
}

/**
 * Listen on 127.0.0.1:port (0 picks an ephemeral port). Each connection
 * gets a fresh environment and session; a close op ends only that
 * connection, the listener stays up for the next trial.
 */
export function serveTcp(factory: EnvFactory, port: number): Promise<net.Server> {
  const server = net.createServer((socket) => {
    const session = new Session(factory());
    const rl = createInterface({ input: socket, terminal: false });
    rl.on("line", (line) => {
      const replies = session.handleLine(line);
      if (replies === null) {
        socket.end();
        rl.close();
        return;
      }
      for (const reply of replies) {
        socket.write(reply + "\n");
      }
    });
    socket.on("error", () => socket.destroy());
  });
  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(port, "127.0.0.1", () => resolve(server));
  });
}
