// End-to-end: four clients, one real server, one scripted game.
//
// Spawns the Python session service, joins all four seats, streams pushes to
// every client, and drives a scripted 20-move game to completion. After each
// push all clients must display identical boards; an illegal move must
// surface the server's rejection verbatim and change nothing.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, GameClient } from "../src/api.js";
import { Affordance, ClientView, Move } from "../src/types.js";
import { publicBoardModel } from "../src/viewmodel.js";

let server: ChildProcess;
let base: string;
let client: GameClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitForServer(url: string): Promise<void> {
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const response = await fetch(`${url}/packs`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error("server did not come up");
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

beforeAll(async () => {
  const port = await freePort();
  const storage = mkdtempSync(join(tmpdir(), "tdgame-e2e-"));
  server = spawn("python3",
    ["-m", "techdebt_game.cli", "serve", "--port", String(port),
     "--storage", storage],
    { stdio: "ignore" });
  base = `http://127.0.0.1:${port}`;
  client = new GameClient(base);
  await waitForServer(base);
}, 30_000);

afterAll(() => {
  server?.kill();
});

function pickScripted(options: Affordance[]): Move {
  const start = options.find((m) => m.type === "start_ticket");
  if (start !== undefined) {
    return { type: "start_ticket", module: start.module };
  }
  const work = options.find((m) => m.type === "work");
  if (work !== undefined) {
    return { type: "work", module: work.module, incur: [] };
  }
  throw new Error(`nothing scripted to play among ${JSON.stringify(options)}`);
}

describe("four clients, one scripted game", () => {
  it("plays 20 moves to completion with identical boards after each push",
     async () => {
    const created = await client.createSession({
      seed: 2718, max_rounds: 10, timer_minutes: null,
      team_names: ["Red", "Blue"],
    });
    const sessionId = created.session_id;
    const tokens = created.join_tokens.flat();
    expect(tokens).toHaveLength(4);

    // four clients join; all four then follow the push stream
    const seats = [];
    for (const token of tokens) {
      seats.push(await client.join(sessionId, token));
    }
    expect(seats.map((s) => `${s.seat.team}.${s.seat.index}`))
      .toEqual(["0.0", "0.1", "1.0", "1.1"]);
    expect(seats[3].view.status).toBe("running"); // the last join fills the lobby

    const pushed: ClientView[][] = tokens.map(() => []);
    const streams = tokens.map((token, i) =>
      client.streamViews(sessionId, token, (view) => {
        pushed[i].push(view);
      }));

    // scripted drive: both seats of the active team take turns submitting
    const teamTokens = created.join_tokens;
    let moves = 0;
    for (;;) {
      const probe = await client.fetchState(sessionId, tokens[0]);
      if (probe.status === "finished") {
        break;
      }
      const token = teamTokens[probe.active_team][moves % 2];
      const mine = await client.fetchState(sessionId, token);
      const move = pickScripted(mine.your_moves);

      if (moves === 1) {
        // an opposing seat tries to move: rejected verbatim, nothing changes
        const intruder = teamTokens[1 - probe.active_team][0];
        const before = await client.fetchState(sessionId, intruder);
        let rejection: ApiError | null = null;
        try {
          await client.submitMove(sessionId, intruder, move);
        } catch (error) {
          rejection = error as ApiError;
        }
        expect(rejection).not.toBeNull();
        expect(rejection?.code).toBe("not_your_seat");
        expect(rejection?.reason).toBe("not your seat's team turn");
        const after = await client.fetchState(sessionId, intruder);
        expect(after).toEqual(before);
      }

      await client.submitMove(sessionId, token, move);
      moves += 1;
    }
    expect(moves).toBe(20); // 10 rounds, two teams

    // streams close with the final view; wait for all four
    await Promise.all(streams.map((s) => s.done));

    // every client saw the initial snapshot plus one push per move, in order
    for (const views of pushed) {
      expect(views.map((v) => v.seq)).toEqual(
        Array.from({ length: moves + 1 }, (_, i) => i));
    }

    // and after each push, all four boards render identically
    for (let push = 0; push <= moves; push += 1) {
      const boards = pushed.map(
        (views) => JSON.stringify(publicBoardModel(views[push])));
      expect(new Set(boards).size).toBe(1);
    }

    const finale = pushed[0][moves];
    expect(finale.status).toBe("finished");
    expect(finale.result?.reason).toBe("round limit");
    expect(publicBoardModel(finale).tally).not.toBeNull();
  }, 60_000);

  it("rejects a forged token and surfaces machine-readable errors", async () => {
    const created = await client.createSession({ seed: 1, timer_minutes: null });
    let error: ApiError | null = null;
    try {
      await client.join(created.session_id, "forged-token");
    } catch (caught) {
      error = caught as ApiError;
    }
    expect(error?.status).toBe(403);
    expect(error?.code).toBe("bad_token");
  });
});
