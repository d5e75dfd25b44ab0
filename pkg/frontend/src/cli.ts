#!/usr/bin/env node
/**
 * simthresh-adapter: export embeddings and label keywords in the file
 * formats the Python toolkit consumes.
 *
 * Exit codes match the Python CLI: 0 success, 2 validation problem,
 * 3 file I/O problem, 64 usage error.
 */

import * as fs from "fs";
import { pathToFileURL } from "url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import {
  FormatError,
  readJsonl,
  readCatalog,
  writeCatalog,
  writeEmbeddings,
} from "./formats.js";
import { providerFor } from "./providers.js";
import { embedField, embedSurfaces } from "./embed.js";
import {
  buildPrompt,
  generateKeywords,
  HttpChatProvider,
  LocalChatProvider,
  ChatProvider,
} from "./keywords.js";

function fail(code: number, message: string): never {
  console.error(`error: ${message}`);
  process.exit(code);
}

function mapError(err: unknown): never {
  if (err instanceof FormatError) fail(2, err.message);
  const e = err as NodeJS.ErrnoException;
  if (e && typeof e.code === "string" && ["ENOENT", "EACCES", "EISDIR", "ENOSPC"].includes(e.code)) {
    fail(3, `i/o error: ${e.message}`);
  }
  fail(2, (err as Error).message ?? String(err));
}

interface EmbedArgs {
  model: string;
  input: string;
  field: string;
  "batch-size": number;
  out: string;
  "base-url"?: string;
}

async function cmdEmbed(argv: EmbedArgs): Promise<void> {
  try {
    const provider = providerFor(argv.model, argv["base-url"]);
    const rows = readJsonl(argv.input);
    const embeddings = await embedField(provider, rows, argv.field, {
      batchSize: argv["batch-size"],
      onProgress: (done, total) => {
        if (total >= 100) process.stderr.write(`\rembedded ${done}/${total}`);
      },
    });
    writeEmbeddings(argv.out, embeddings);
    console.error(`wrote ${embeddings.length} vectors to ${argv.out}`);
  } catch (err) {
    mapError(err);
  }
}

interface SurfacesArgs {
  model: string;
  catalog: string;
  "batch-size": number;
  out: string;
  "base-url"?: string;
}

async function cmdSurfaces(argv: SurfacesArgs): Promise<void> {
  try {
    const provider = providerFor(argv.model, argv["base-url"]);
    const catalog = readCatalog(argv.catalog);
    const embeddings = await embedSurfaces(provider, catalog, {
      batchSize: argv["batch-size"],
    });
    writeEmbeddings(argv.out, embeddings);
    console.error(`wrote ${embeddings.length} surface vectors to ${argv.out}`);
  } catch (err) {
    mapError(err);
  }
}

interface KeywordsArgs {
  catalog: string;
  provider: string;
  model: string;
  out: string;
  "base-url"?: string;
  "dry-run": boolean;
}

async function cmdKeywords(argv: KeywordsArgs): Promise<void> {
  try {
    const catalog = readCatalog(argv.catalog);
    if (argv["dry-run"]) {
      // prompts only, nothing leaves the machine
      for (const entry of catalog) {
        console.log(`### ${entry.label}`);
        console.log(buildPrompt(entry));
        console.log();
      }
      return;
    }
    let chat: ChatProvider;
    if (argv.provider === "local") {
      chat = new LocalChatProvider();
    } else if (argv.provider === "http") {
      if (!argv["base-url"]) {
        throw new FormatError("--provider http needs --base-url");
      }
      chat = new HttpChatProvider({ baseUrl: argv["base-url"], model: argv.model });
    } else {
      throw new FormatError(`unknown provider: ${argv.provider} (expected local or http)`);
    }
    const result = await generateKeywords(chat, catalog, (msg) => console.error(`warning: ${msg}`));
    writeCatalog(argv.out, result.catalog);
    fs.writeFileSync(`${argv.out}.status.json`, JSON.stringify(result.statuses, null, 2) + "\n");
    const failed = result.statuses.filter((s) => s.status === "failed").length;
    console.error(
      `wrote ${result.catalog.length} entries to ${argv.out} (${failed} label(s) kept previous keywords)`,
    );
  } catch (err) {
    mapError(err);
  }
}

export async function main(args: string[]): Promise<void> {
  await yargs(args)
    .scriptName("simthresh-adapter")
    .usage("$0 <command> [options]")
    .command(
      "embed",
      "embed one string field of a JSONL file",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true, describe: "encoder id, or fake:<dim> for offline runs" })
          .option("input", { type: "string", demandOption: true, describe: "JSONL file to read" })
          .option("field", { type: "string", default: "text", describe: "field holding the string to embed" })
          .option("batch-size", { type: "number", default: 8 })
          .option("base-url", { type: "string", describe: "OpenAI-compatible endpoint root" })
          .option("out", { type: "string", demandOption: true, describe: "embeddings JSONL to write" }),
      (argv) => cmdEmbed(argv as unknown as EmbedArgs),
    )
    .command(
      "surfaces",
      "embed every surface form of a label catalog",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true })
          .option("catalog", { type: "string", demandOption: true, describe: "catalog JSON to read" })
          .option("batch-size", { type: "number", default: 8 })
          .option("base-url", { type: "string" })
          .option("out", { type: "string", demandOption: true }),
      (argv) => cmdSurfaces(argv as unknown as SurfacesArgs),
    )
    .command(
      "keywords",
      "generate ten keywords per catalog label",
      (y) =>
        y
          .option("catalog", { type: "string", demandOption: true })
          .option("provider", { type: "string", default: "http", describe: "local or http" })
          .option("model", { type: "string", default: "gpt-4o" })
          .option("base-url", { type: "string" })
          .option("out", { type: "string", demandOption: true, describe: "catalog JSON to write" })
          .option("dry-run", { type: "boolean", default: false, describe: "print prompts, call nothing" }),
      (argv) => cmdKeywords(argv as unknown as KeywordsArgs),
    )
    .demandCommand(1, "pick a command: embed, surfaces, or keywords")
    .strict()
    .fail((msg, err, y) => {
      if (err) throw err;
      y.showHelp("error");
      console.error(`\nerror: ${msg}`);
      process.exit(64);
    })
    .parseAsync();
}

// npm installs the bin as a symlink, so resolve before comparing
function isDirectRun(): boolean {
  if (typeof process.argv[1] !== "string") return false;
  try {
    return import.meta.url === pathToFileURL(fs.realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (isDirectRun()) {
  main(hideBin(process.argv));
}
