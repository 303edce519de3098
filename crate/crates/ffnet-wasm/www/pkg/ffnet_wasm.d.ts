/* tslint:disable */
/* eslint-disable */
/**
 * Region codes over an nx × ny grid, row-major with μ̃ descending so row 0
 * is the top of the image. 255 marks a point that could not be classified.
 */
export function phase_diagram(sigma_min: number, sigma_max: number, nx: number, mu_min: number, mu_max: number, ny: number, gamma: number): Uint8Array;
/**
 * Gain |A| at `n_phi` emission angles spanning [−π/2, π/2].
 */
export function beam_pattern(n_elements: number, kd: number, theta: number, n_phi: number): Float64Array;
/**
 * Reduced-system orbit from (v0_re, v0_im) as interleaved [re, im, re, im, ...].
 */
export function reduced_trajectory(sigma_t: number, mu_t: number, gamma: number, v0_re: number, v0_im: number, t_end: number, dt: number, stride: number): Float64Array;
/**
 * Attractor class reached from (v0_re, v0_im): "FixedPoint", "Torus", ...
 */
export function reduced_attractor(sigma_t: number, mu_t: number, gamma: number, v0_re: number, v0_im: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
  readonly memory: WebAssembly.Memory;
  readonly beam_pattern: (a: number, b: number, c: number, d: number) => [number, number];
  readonly phase_diagram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
  readonly reduced_attractor: (a: number, b: number, c: number, d: number, e: number) => [number, number];
  readonly reduced_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
  readonly __wbindgen_export_0: WebAssembly.Table;
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
