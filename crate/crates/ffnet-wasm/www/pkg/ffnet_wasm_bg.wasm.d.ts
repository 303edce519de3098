/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const beam_pattern: (a: number, b: number, c: number, d: number) => [number, number];
export const phase_diagram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
export const reduced_attractor: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const reduced_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
export const __wbindgen_export_0: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
