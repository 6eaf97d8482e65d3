/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const filter_check: (a: number, b: number, c: number, d: number) => [number, number];
export const probabilities: (a: number, b: number, c: number) => [number, number];
export const valuation: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
