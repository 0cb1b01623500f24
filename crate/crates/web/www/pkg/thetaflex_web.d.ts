/* tslint:disable */
/* eslint-disable */

/**
 * Catalecticant test on a sum of five fourth powers and on the same sum
 * with a sixth power added.
 */
export function clebsch_demo(seed: bigint, tol: number): string;

/**
 * Scans the corrected bitangent form along τ(t) = i(I + tS) for a random S,
 * then tests the line a at the root and slightly past it.
 */
export function hyperflex_scan(seed: bigint, a: number, b: number, samples: number): string;

/**
 * The 36 even theta constants at τ = re + i·im (row-major 3×3).
 */
export function theta_constants(re: Float64Array, im: Float64Array): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly clebsch_demo: (a: bigint, b: number) => [number, number];
    readonly hyperflex_scan: (a: bigint, b: number, c: number, d: number) => [number, number];
    readonly theta_constants: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
