/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const clebsch_demo: (a: bigint, b: number) => [number, number];
export const hyperflex_scan: (a: bigint, b: number, c: number, d: number) => [number, number];
export const theta_constants: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
