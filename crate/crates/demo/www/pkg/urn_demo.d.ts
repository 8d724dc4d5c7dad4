/* tslint:disable */
/* eslint-disable */

/**
 * The deterministic product `beta_N(t)` next to the Gaussian characteristic
 * function.
 */
export function cf_product(a: number, b: number, c: number, p: number, n_steps: number, t_max: number, t_points: number): string;

/**
 * Histogram of `sqrt(n) (Z_n - 1/2)` over independent replicates, with the
 * limiting Gaussian density at bin midpoints.
 */
export function clt_histogram(a: number, b: number, c: number, p: number, n: number, replicates: number, bins: number, seed: number): string;

/**
 * One trajectory of the proportion `Z_n`, sampled on a log-spaced grid.
 */
export function simulate_path(a: number, b: number, c: number, p: number, horizon: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cf_product: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly clt_histogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly simulate_path: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
