/* tslint:disable */
/* eslint-disable */

/**
 * 1D focusing simulation from a Gaussian, advanced frame by frame.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Takes `steps` time steps.
     */
    advance(steps: number): void;
    /**
     * `|u|²` on the grid.
     */
    density(): Float64Array;
    /**
     * `[t, mass, energy, ‖∇u‖, e^{2A}M/M₀ - 1]`
     */
    diagnostics(): Float64Array;
    constructor(damping: string, p: number, amplitude: number, width: number, points: number, half_length: number, dt: number);
    time(): number;
    x(): Float64Array;
}

/**
 * `a(t)` then `A(t)` at `n` uniform times in `[0, t_max]`, concatenated.
 */
export function damping_curves(spec: string, t_max: number, n: number): Float64Array;

/**
 * `[inf A(t)/t, 1 if A(t) → ∞ else 0]`
 */
export function damping_summary(spec: string): Float64Array;

/**
 * 1D sharp constant by ascent. Returns `[K, iterations, profile...]`.
 */
export function gn_ascent(p: number, points: number, half_length: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly damping_curves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly damping_summary: (a: number, b: number) => [number, number, number, number];
    readonly gn_ascent: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_advance: (a: number, b: number) => [number, number];
    readonly simulation_density: (a: number) => [number, number];
    readonly simulation_diagnostics: (a: number) => [number, number, number, number];
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly simulation_time: (a: number) => number;
    readonly simulation_x: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
