//! Browser demo: interactive Wigner and Husimi fields plus the electric
//! Aharonov-Bohm detection curve.
//!
//! Build with `wasm-pack build --target web crates/wasm-demo` and serve
//! `crates/wasm-demo/www/`; on native targets only the field computations
//! (and their tests) are compiled.

pub mod fields;

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn to_js(result: Result<Vec<f64>, String>) -> Result<js_sys::Float64Array, JsValue> {
        result
            .map(|v| js_sys::Float64Array::from(v.as_slice()))
            .map_err(|e| JsValue::from_str(&e))
    }

    /// Row-major n x n Wigner field of a packet (or two-packet superposition).
    #[wasm_bindgen]
    pub fn wigner_field(
        q0: f64,
        p0: f64,
        width: f64,
        separation: f64,
        n: usize,
    ) -> Result<js_sys::Float64Array, JsValue> {
        to_js(super::fields::wigner_field(q0, p0, width, separation, n))
    }

    /// Matching Husimi field: the Gaussian-smoothed, nonnegative view.
    #[wasm_bindgen]
    pub fn husimi_field(
        q0: f64,
        p0: f64,
        width: f64,
        separation: f64,
        n: usize,
    ) -> Result<js_sys::Float64Array, JsValue> {
        to_js(super::fields::husimi_field(q0, p0, width, separation, n))
    }

    /// Interleaved `t, P_sim, P_closed` rows for the electric AB scenario.
    #[wasm_bindgen]
    pub fn electric_ab_curve(
        dphi: f64,
        charge: f64,
        tau: f64,
        n_tau: usize,
    ) -> Result<js_sys::Float64Array, JsValue> {
        to_js(super::fields::electric_ab_curve(dphi, charge, tau, n_tau))
    }

    /// Half-extent of the square phase-space window used by the field views.
    #[wasm_bindgen]
    pub fn grid_extent() -> f64 {
        super::fields::GRID_EXTENT
    }
}

#[cfg(target_arch = "wasm32")]
pub use bindings::*;
