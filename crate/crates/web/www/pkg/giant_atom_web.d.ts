/* tslint:disable */
/* eslint-disable */

/**
 * Rate `|Σ g_k e^{iφx_k}|²` and shift `Σ_{k<l} g_k g_l sin(φ(x_l-x_k))` of
 * an arbitrary layout against `ν = φ/2π`, with `φ` the phase across one
 * unit of length.
 */
export function layout_response(positions: Float64Array, weights: Float64Array, nu_min: number, nu_max: number, points: number): string;

/**
 * One of the designed four-point layouts (`two-maxima`, `flat-maximum`,
 * `shallow-minima`, or `a`/`b`/`c`) with its curve on `ν ∈ [0.25, 1.75]`.
 */
export function preset_curve(name: string, points: number): string;

/**
 * Closed forms for `n` equally spaced, equally weighted points against
 * `φ/2π ∈ [0, 2]`, in units of the single-point rate `γ`.
 */
export function symmetric_curves(n: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly layout_response: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly preset_curve: (a: number, b: number, c: number) => [number, number];
    readonly symmetric_curves: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
