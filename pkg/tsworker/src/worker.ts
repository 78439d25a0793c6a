#!/usr/bin/env node
/**
 * CLI worker: joins a head, runs the requested kernel collectively, exits 0.
 *
 *   worker.js --head <host:port> -- <pi|primes> [--n N --seed S | --lo L --hi H]
 *
 * MMPI_HEAD supplies the head address when --head is absent.  The frames this
 * worker emits are byte-identical to the reference worker's for the same
 * (kernel, world size, rank, seed).
 */

import { MASK64 } from "./rng.js";
import { mcHits, partitionRange, primesInRange, trialShare } from "./kernels.js";
import { WorkerWorld, workerJoin } from "./client.js";
import { u64 } from "./protocol.js";

const KERNELS = new Set(["pi", "primes"]);

interface Args {
  head: string;
  kernel: string;
  opts: Map<string, bigint>;
}

function parseArgs(argv: string[]): Args {
  let head = process.env.MMPI_HEAD ?? "";
  const split = argv.indexOf("--");
  const own = split >= 0 ? argv.slice(0, split) : argv;
  const rest = split >= 0 ? argv.slice(split + 1) : [];
  for (let i = 0; i < own.length; i += 2) {
    if (own[i] === "--head") head = own[i + 1];
    else throw new Error(`unknown option ${own[i]}`);
  }
  if (!head) throw new Error("worker needs --head or MMPI_HEAD");
  if (rest.length === 0) throw new Error("no kernel given after --");
  const opts = new Map<string, bigint>();
  for (let i = 1; i < rest.length; i += 2) {
    if (!rest[i].startsWith("--")) throw new Error(`unexpected kernel argument ${rest[i]}`);
    opts.set(rest[i].slice(2), BigInt(rest[i + 1]));
  }
  return { head, kernel: rest[0], opts };
}

async function runPi(world: WorkerWorld): Promise<void> {
  const params = await world.broadcastRecv(0);
  if (params.kind !== 2) throw new Error("bad pi parameter payload");
  const [nTotal, baseSeed] = params.values;
  const share = trialShare(nTotal, world.worldSize, world.myRank);
  const hits = mcHits(share, (baseSeed + BigInt(world.myRank)) & MASK64);
  world.reduceContribute(0, u64([hits]));
  world.reduceContribute(0, u64([share]));
}

async function runPrimes(world: WorkerWorld): Promise<void> {
  const params = await world.broadcastRecv(0);
  if (params.kind !== 2) throw new Error("bad primes parameter payload");
  const [lo, hi] = params.values;
  const [start, end] = partitionRange(lo, hi, world.worldSize, world.myRank);
  world.gatherContribute(0, u64(primesInRange(start, end)));
}

async function main(): Promise<number> {
  const args = parseArgs(process.argv.slice(2));
  const [host, portText] = args.head.split(":");
  const world = await workerJoin(host, Number(portText ?? 29500));
  if (!KERNELS.has(args.kernel)) {
    world.sendError(`unknown kernel '${args.kernel}'`);
    world.close();
    return 1;
  }
  await world.barrier();
  if (args.kernel === "pi") await runPi(world);
  else await runPrimes(world);
  await world.barrier();
  await world.awaitShutdown();
  world.close();
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(String(err));
    process.exit(1);
  },
);
