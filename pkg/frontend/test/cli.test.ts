import { describe, it, expect, beforeAll, afterAll, beforeEach, vi } from "vitest";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { main } from "../src/cli.js";
import { readJsonl, readCatalog } from "../src/formats.js";

class ExitError extends Error {
  constructor(public code: number) {
    super(`exit ${code}`);
  }
}

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "adapter-cli-"));
  // the CLI calls process.exit on failure; turn that into a throw we can assert
  vi.spyOn(process, "exit").mockImplementation(((code?: number) => {
    throw new ExitError(code ?? 0);
  }) as never);
  vi.spyOn(console, "error").mockImplementation(() => {});
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
  vi.restoreAllMocks();
});

beforeEach(() => {
  vi.mocked(process.exit).mockClear();
});

async function exitCode(args: string[]): Promise<number> {
  try {
    await main(args);
    return 0;
  } catch (err) {
    if (err instanceof ExitError) return err.code;
    throw err;
  }
}

const catalogPath = () => {
  const p = path.join(dir, "catalog.json");
  fs.writeFileSync(
    p,
    JSON.stringify([
      { label: "A", adjusted_name: "Alpha Topic", keywords: ["k1"] },
      { label: "B", adjusted_name: null, keywords: [] },
    ]),
  );
  return p;
};

describe("embed command", () => {
  it("writes embeddings the validator accepts", async () => {
    const input = path.join(dir, "texts.jsonl");
    fs.writeFileSync(
      input,
      ['{"id":"d1","text":"first"}', '{"id":"d2","text":"second"}'].join("\n") + "\n",
    );
    const out = path.join(dir, "emb.jsonl");
    const rc = await exitCode([
      "embed", "--model", "fake:12", "--input", input, "--out", out,
    ]);
    expect(rc).toBe(0);
    const rows = readJsonl(out) as { id: string; vector: number[] }[];
    expect(rows.map((r) => r.id)).toEqual(["d1", "d2"]);
    expect(rows[0].vector).toHaveLength(12);
  });

  it("exits 2 on a validation problem", async () => {
    const input = path.join(dir, "dupe.jsonl");
    fs.writeFileSync(input, '{"id":"d","text":"a"}\n{"id":"d","text":"b"}\n');
    const rc = await exitCode([
      "embed", "--model", "fake:4", "--input", input, "--out", path.join(dir, "x.jsonl"),
    ]);
    expect(rc).toBe(2);
  });

  it("exits 3 when the input file is missing", async () => {
    const rc = await exitCode([
      "embed", "--model", "fake:4",
      "--input", path.join(dir, "nope.jsonl"),
      "--out", path.join(dir, "x.jsonl"),
    ]);
    expect(rc).toBe(3);
  });

  it("exits 64 when required flags are missing", async () => {
    expect(await exitCode(["embed", "--model", "fake:4"])).toBe(64);
  });
});

describe("surfaces command", () => {
  it("embeds each catalog surface once", async () => {
    const out = path.join(dir, "surf.jsonl");
    const rc = await exitCode([
      "surfaces", "--model", "fake:8", "--catalog", catalogPath(), "--out", out,
    ]);
    expect(rc).toBe(0);
    const rows = readJsonl(out) as { id: string }[];
    expect(rows.map((r) => r.id)).toEqual(["A", "Alpha Topic", "k1", "B"]);
  });
});

describe("keywords command", () => {
  it("fills ten keywords per label with the local provider", async () => {
    const out = path.join(dir, "cat-out.json");
    const rc = await exitCode([
      "keywords", "--catalog", catalogPath(), "--provider", "local", "--out", out,
    ]);
    expect(rc).toBe(0);
    const catalog = readCatalog(out);
    expect(catalog[0].keywords).toHaveLength(10);
    expect(catalog[1].keywords).toHaveLength(10);
    const statuses = JSON.parse(fs.readFileSync(`${out}.status.json`, "utf-8"));
    expect(statuses.map((s: any) => s.status)).toEqual(["ok", "ok"]);
  });

  it("dry-run prints prompts and writes nothing", async () => {
    const logs: string[] = [];
    const logSpy = vi.spyOn(console, "log").mockImplementation((m?: any) => {
      logs.push(String(m ?? ""));
    });
    const out = path.join(dir, "never.json");
    const rc = await exitCode([
      "keywords", "--catalog", catalogPath(), "--out", out, "--dry-run",
    ]);
    logSpy.mockRestore();
    expect(rc).toBe(0);
    expect(fs.existsSync(out)).toBe(false);
    expect(logs.join("\n")).toContain("### A");
    expect(logs.join("\n")).toContain('"Alpha Topic"');
  });

  it("rejects an unknown provider", async () => {
    const rc = await exitCode([
      "keywords", "--catalog", catalogPath(), "--provider", "psychic",
      "--out", path.join(dir, "x.json"),
    ]);
    expect(rc).toBe(2);
  });
});

describe("usage errors", () => {
  it("exits 64 with no command", async () => {
    expect(await exitCode([])).toBe(64);
  });

  it("exits 64 on an unknown command", async () => {
    expect(await exitCode(["transmogrify"])).toBe(64);
  });
});
