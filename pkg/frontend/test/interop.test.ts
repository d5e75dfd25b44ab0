/**
 * End-to-end check against the Python toolkit: everything this adapter
 * writes must load cleanly over there, and the exported files must be
 * enough to drive the label-embedding and similarity stages.
 *
 * Skipped when the Python package isn't importable on this machine.
 */

import { describe, it, expect, beforeAll, afterAll } from "vitest";
import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { writeEmbeddings, writeCatalog, CatalogEntry } from "../src/formats.js";
import { embedField, embedSurfaces } from "../src/embed.js";
import { FakeProvider } from "../src/providers.js";

const havePython =
  spawnSync("python3", ["-c", "import simthresh"], { encoding: "utf-8" }).status === 0;

const catalog: CatalogEntry[] = [
  {
    label: "MECH",
    adjusted_name: "Biological Mechanisms",
    keywords: ["Viral Replication", "Pathogenesis", "Immune Response"],
  },
  {
    label: "CASE",
    adjusted_name: "Case Reports",
    keywords: ["patient", "clinical presentation"],
  },
  { label: "DIAG", adjusted_name: null, keywords: ["PCR", "antigen test"] },
];

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "adapter-interop-"));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function py(code: string) {
  return spawnSync("python3", ["-c", code], { encoding: "utf-8" });
}

describe.skipIf(!havePython)("interop with the Python toolkit", () => {
  it("exported embeddings satisfy the Python loader", async () => {
    const rows = [
      { id: "d1", text: "viral replication in host cells" },
      { id: "d2", text: "a case report of an unusual presentation" },
    ];
    const out = path.join(dir, "texts_emb.jsonl");
    writeEmbeddings(out, await embedField(new FakeProvider(16), rows, "text"));

    const res = py(
      `
import json
from simthresh import load_embeddings
m = load_embeddings(${JSON.stringify(out)})
print(json.dumps({"ids": list(m.ids), "dim": int(m.matrix.shape[1])}))
`,
    );
    expect(res.status, res.stderr).toBe(0);
    const parsed = JSON.parse(res.stdout.trim());
    expect(parsed).toEqual({ ids: ["d1", "d2"], dim: 16 });
  }, 60_000);

  it("exported catalog and surfaces drive build-labels end to end", async () => {
    const catalogFile = path.join(dir, "catalog.json");
    writeCatalog(catalogFile, catalog);

    const surfacesFile = path.join(dir, "surfaces.jsonl");
    writeEmbeddings(surfacesFile, await embedSurfaces(new FakeProvider(16), catalog));

    const labelsFile = path.join(dir, "labels.jsonl");
    const build = spawnSync(
      "simthresh",
      [
        "build-labels",
        "--catalog", catalogFile,
        "--surfaces", surfacesFile,
        "--mode", "keywords",
        "--out", labelsFile,
      ],
      { encoding: "utf-8" },
    );
    expect(build.status, build.stderr).toBe(0);

    const res = py(
      `
import json
from simthresh import load_embeddings
m = load_embeddings(${JSON.stringify(labelsFile)})
print(json.dumps({"ids": list(m.ids), "dim": int(m.matrix.shape[1])}))
`,
    );
    expect(res.status, res.stderr).toBe(0);
    const parsed = JSON.parse(res.stdout.trim());
    expect(parsed).toEqual({ ids: ["MECH", "CASE", "DIAG"], dim: 16 });
  }, 60_000);

  it("every representation mode finds its surfaces in one export", async () => {
    const catalogFile = path.join(dir, "catalog2.json");
    writeCatalog(catalogFile, catalog);
    const surfacesFile = path.join(dir, "surfaces2.jsonl");
    writeEmbeddings(surfacesFile, await embedSurfaces(new FakeProvider(8), catalog));

    for (const mode of ["name", "adjusted", "keywords"]) {
      const build = spawnSync(
        "simthresh",
        [
          "build-labels",
          "--catalog", catalogFile,
          "--surfaces", surfacesFile,
          "--mode", mode,
          "--out", path.join(dir, `labels_${mode}.jsonl`),
        ],
        { encoding: "utf-8" },
      );
      expect(build.status, `mode ${mode}: ${build.stderr}`).toBe(0);
    }
  }, 60_000);

  it("text embeddings feed the similarity stage", async () => {
    const docs = [
      { id: "t1", text: "replication and immune response" },
      { id: "t2", text: "pcr testing procedure" },
      { id: "t3", text: "patient admitted with symptoms" },
    ];
    const textsEmb = path.join(dir, "sim_texts.jsonl");
    writeEmbeddings(textsEmb, await embedField(new FakeProvider(8), docs, "text"));

    const catalogFile = path.join(dir, "catalog3.json");
    writeCatalog(catalogFile, catalog);
    const surfacesFile = path.join(dir, "surfaces3.jsonl");
    writeEmbeddings(surfacesFile, await embedSurfaces(new FakeProvider(8), catalog));
    const labelsFile = path.join(dir, "labels3.jsonl");
    spawnSync("simthresh", [
      "build-labels", "--catalog", catalogFile, "--surfaces", surfacesFile,
      "--mode", "name", "--out", labelsFile,
    ]);

    const simsFile = path.join(dir, "sims.jsonl");
    const sim = spawnSync(
      "simthresh",
      [
        "similarity",
        "--texts", textsEmb,
        "--labels", labelsFile,
        "--metric", "cosine",
        "--format", "jsonl",
        "--out", simsFile,
      ],
      { encoding: "utf-8" },
    );
    expect(sim.status, sim.stderr).toBe(0);
    expect(fs.existsSync(simsFile)).toBe(true);
  }, 60_000);
});
