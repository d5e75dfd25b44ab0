/**
 * File schemas shared with the Python toolkit.
 *
 * Embeddings travel as JSONL rows {"id": string, "vector": number[]};
 * label catalogs as a JSON list of {"label", "adjusted_name", "keywords"}.
 * Anything written here must load on the Python side without warnings.
 */

import * as fs from "fs";

export interface EmbeddingRow {
  id: string;
  vector: number[];
}

export interface CatalogEntry {
  label: string;
  adjusted_name: string | null;
  keywords: string[];
}

export class FormatError extends Error {}

export function readJsonl(path: string): unknown[] {
  const text = fs.readFileSync(path, "utf-8");
  const rows: unknown[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    try {
      rows.push(JSON.parse(line));
    } catch {
      throw new FormatError(`${path}:${i + 1}: malformed JSON`);
    }
  }
  return rows;
}

export function writeJsonl(path: string, rows: object[]): void {
  const body = rows.map((r) => JSON.stringify(r)).join("\n");
  fs.writeFileSync(path, rows.length ? body + "\n" : "");
}

/** Reject anything the Python loader would reject: duplicate ids, ragged
 * or non-finite vectors. */
export function validateEmbeddings(rows: EmbeddingRow[]): void {
  const seen = new Set<string>();
  let dim: number | null = null;
  for (const row of rows) {
    if (typeof row.id !== "string") {
      throw new FormatError(`embedding id must be a string, got ${typeof row.id}`);
    }
    if (seen.has(row.id)) {
      throw new FormatError(`duplicate embedding id: ${row.id}`);
    }
    seen.add(row.id);
    if (dim === null) dim = row.vector.length;
    if (row.vector.length !== dim) {
      throw new FormatError(
        `vector for ${row.id} has ${row.vector.length} components, expected ${dim}`,
      );
    }
    for (const x of row.vector) {
      if (typeof x !== "number" || !Number.isFinite(x)) {
        throw new FormatError(`non-finite component in vector for ${row.id}`);
      }
    }
  }
}

export function writeEmbeddings(path: string, rows: EmbeddingRow[]): void {
  validateEmbeddings(rows);
  writeJsonl(path, rows);
}

export function readCatalog(path: string): CatalogEntry[] {
  const text = fs.readFileSync(path, "utf-8");
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new FormatError(`${path}: malformed JSON`);
  }
  if (!Array.isArray(raw)) {
    throw new FormatError(`${path}: catalog must be a JSON list`);
  }
  return raw.map((item, i) => {
    if (typeof item !== "object" || item === null || typeof (item as any).label !== "string") {
      throw new FormatError(`${path}: entry ${i} must be an object with a 'label'`);
    }
    const entry = item as Record<string, unknown>;
    return {
      label: entry.label as string,
      adjusted_name: typeof entry.adjusted_name === "string" ? entry.adjusted_name : null,
      keywords: Array.isArray(entry.keywords) ? entry.keywords.map(String) : [],
    };
  });
}

export function writeCatalog(path: string, catalog: CatalogEntry[]): void {
  fs.writeFileSync(path, JSON.stringify(catalog, null, 2) + "\n");
}

/** Every surface string any representation mode could ask for, deduplicated
 * in catalog order: name, adjusted name, then keywords per entry. */
export function surfacesFromCatalog(catalog: CatalogEntry[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  const add = (s: string) => {
    if (!seen.has(s)) {
      seen.add(s);
      out.push(s);
    }
  };
  for (const entry of catalog) {
    add(entry.label);
    if (entry.adjusted_name) add(entry.adjusted_name);
    for (const kw of entry.keywords) add(kw);
  }
  return out;
}
