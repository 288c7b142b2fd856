//! C ABI for chiralsg.
//!
//! Models and simulation results are opaque handles created and destroyed
//! through this interface. Every fallible function returns a [`CsgStatus`];
//! on failure a description is available from [`csg_last_error`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chiralsg::dynamics::{propagate, IntegratorConfig, PhaseSpaceState};
use chiralsg::ensemble::{run_experiment, separation_stats, EnsembleConfig, ExperimentResult};
use chiralsg::gauge::GaugePoint;
use chiralsg::reduction::{exact_eigs, full_three_level, EffectiveTwoLevel};
use chiralsg::{normalize, Chirality, Error, FieldModel, PhysicalParams, Preset, ScalarConvention, Species, Spin};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsgStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameter values or enum codes.
    InvalidArgument = 2,
    /// Integration produced a non-finite state, or another physics failure.
    Physics = 3,
    /// Index past the end of a result.
    OutOfRange = 4,
    /// Internal panic caught at the boundary.
    Panic = 5,
}

pub const CSG_PRESET_FIG3ABC: u32 = 0;
pub const CSG_PRESET_FIG3DEF: u32 = 1;

pub const CSG_CHIRALITY_LEFT: u32 = 0;
pub const CSG_CHIRALITY_RIGHT: u32 = 1;

pub const CSG_CONVENTION_PAPER: u32 = 0;
pub const CSG_CONVENTION_STANDARD: u32 = 1;

/// Species codes: 0 L_up, 1 L_down, 2 R_up, 3 R_down.
pub const CSG_SPECIES_COUNT: u32 = 4;

/// Physical inputs in SI units (rad/s, m, m/s²); geometry in wavelengths.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsgPhysicalParams {
    pub wavelength: f64,
    pub mass_factor: f64,
    pub detuning: f64,
    pub rabi_12: f64,
    pub rabi_13: f64,
    pub rabi_23: f64,
    pub sigma_12: f64,
    pub sigma_13: f64,
    pub sigma_23: f64,
    pub beam_offset: f64,
    pub k13_ratio: f64,
    pub k23_ratio: f64,
    pub gravity: f64,
    pub ensemble_width: f64,
}

impl From<&PhysicalParams> for CsgPhysicalParams {
    fn from(p: &PhysicalParams) -> Self {
        CsgPhysicalParams {
            wavelength: p.wavelength,
            mass_factor: p.mass_factor,
            detuning: p.detuning,
            rabi_12: p.rabi_12,
            rabi_13: p.rabi_13,
            rabi_23: p.rabi_23,
            sigma_12: p.sigma_12,
            sigma_13: p.sigma_13,
            sigma_23: p.sigma_23,
            beam_offset: p.beam_offset,
            k13_ratio: p.k13_ratio,
            k23_ratio: p.k23_ratio,
            gravity: p.gravity,
            ensemble_width: p.ensemble_width,
        }
    }
}

impl From<&CsgPhysicalParams> for PhysicalParams {
    fn from(p: &CsgPhysicalParams) -> Self {
        PhysicalParams {
            wavelength: p.wavelength,
            mass_factor: p.mass_factor,
            detuning: p.detuning,
            rabi_12: p.rabi_12,
            rabi_13: p.rabi_13,
            rabi_23: p.rabi_23,
            sigma_12: p.sigma_12,
            sigma_13: p.sigma_13,
            sigma_23: p.sigma_23,
            beam_offset: p.beam_offset,
            k13_ratio: p.k13_ratio,
            k23_ratio: p.k23_ratio,
            gravity: p.gravity,
            ensemble_width: p.ensemble_width,
        }
    }
}

/// Gauge data at one x in simulation units (A in units of k₁₂, B in k₁₂²).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsgFieldPoint {
    pub a_up: f64,
    pub a_down: f64,
    pub v_up: f64,
    pub v_down: f64,
    pub b_up: f64,
    pub b_down: f64,
    pub theta: f64,
    pub dtheta_dx: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsgState {
    pub x: f64,
    pub z: f64,
    pub px: f64,
    pub pz: f64,
}

impl From<CsgState> for PhaseSpaceState {
    fn from(s: CsgState) -> Self {
        PhaseSpaceState::new(s.x, s.z, s.px, s.pz)
    }
}

impl From<PhaseSpaceState> for CsgState {
    fn from(s: PhaseSpaceState) -> Self {
        CsgState { x: s.x, z: s.z, px: s.px, pz: s.pz }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsgRecord {
    pub species: u32,
    pub particle_id: u64,
    pub state: CsgState,
}

/// Opaque field model.
pub struct CsgModel {
    inner: FieldModel,
    time_unit: f64,
}

/// Opaque simulation result.
pub struct CsgResult {
    inner: ExperimentResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: CsgStatus, msg: impl Into<String>) -> CsgStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> CsgStatus {
    let status = match e {
        Error::NonFinite { .. } | Error::Integration { .. } => CsgStatus::Physics,
        _ => CsgStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting panics into [`CsgStatus::Panic`].
fn guard(f: impl FnOnce() -> CsgStatus) -> CsgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CsgStatus::Panic, "internal panic"),
    }
}

fn preset(code: u32) -> Option<Preset> {
    match code {
        CSG_PRESET_FIG3ABC => Some(Preset::Fig3abc),
        CSG_PRESET_FIG3DEF => Some(Preset::Fig3def),
        _ => None,
    }
}

fn chirality(code: u32) -> Option<Chirality> {
    match code {
        CSG_CHIRALITY_LEFT => Some(Chirality::Left),
        CSG_CHIRALITY_RIGHT => Some(Chirality::Right),
        _ => None,
    }
}

fn species(code: u32) -> Option<Species> {
    Species::ALL.get(code as usize).copied()
}

fn convention(code: u32) -> Option<ScalarConvention> {
    match code {
        CSG_CONVENTION_PAPER => Some(ScalarConvention::Paper),
        CSG_CONVENTION_STANDARD => Some(ScalarConvention::Standard),
        _ => None,
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 if there is none. `buf` may be NULL to query the length.
///
/// # Safety
/// `buf` must be NULL or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn csg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn csg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fills `out` with a preset's physical parameters.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_preset_params(preset_code: u32, out: *mut CsgPhysicalParams) -> CsgStatus {
    guard(|| {
        if out.is_null() {
            return fail(CsgStatus::NullPointer, "out is NULL");
        }
        let Some(p) = preset(preset_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown preset code {preset_code}"));
        };
        *out = CsgPhysicalParams::from(&p.physical());
        CsgStatus::Ok
    })
}

/// Builds a model from physical parameters. Free with [`csg_model_free`].
///
/// # Safety
/// `params` must point to a valid struct; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_model_new(
    params: *const CsgPhysicalParams,
    convention_code: u32,
    out: *mut *mut CsgModel,
) -> CsgStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return fail(CsgStatus::NullPointer, "params or out is NULL");
        }
        *out = ptr::null_mut();
        let Some(conv) = convention(convention_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown convention code {convention_code}"));
        };
        let p = PhysicalParams::from(&*params);
        let built = normalize(&p).and_then(|n| Ok((FieldModel::new(&n)?.with_convention(conv), n.time_unit)));
        match built {
            Ok((inner, time_unit)) => {
                *out = Box::into_raw(Box::new(CsgModel { inner, time_unit }));
                CsgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must be NULL or a pointer from [`csg_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csg_model_free(model: *mut CsgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Simulation time unit T₀ in seconds.
///
/// # Safety
/// `model` must be a live model handle.
#[no_mangle]
pub unsafe extern "C" fn csg_model_time_unit(model: *const CsgModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.time_unit)
}

/// Gauge fields at position x (units of λ) for one chirality.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_model_fields(
    model: *const CsgModel,
    x: f64,
    chirality_code: u32,
    out: *mut CsgFieldPoint,
) -> CsgStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return fail(CsgStatus::NullPointer, "model or out is NULL");
        };
        let Some(c) = chirality(chirality_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown chirality code {chirality_code}"));
        };
        let k = m.inner.k12();
        let g = GaugePoint::at(&m.inner, x, c, 0.0);
        *out = CsgFieldPoint {
            a_up: g.a_z[0] / k,
            a_down: g.a_z[1] / k,
            v_up: g.v[0],
            v_down: g.v[1],
            b_up: g.b_y[0] / (k * k),
            b_down: g.b_y[1] / (k * k),
            theta: g.theta,
            dtheta_dx: g.dtheta_dx,
        };
        CsgStatus::Ok
    })
}

/// Reduced eigenvalues (λ₁, λ₂) and the three exact eigenvalues (ascending)
/// of the full three-level Hamiltonian at (x, z).
///
/// # Safety
/// `model` must be a live handle; `reduced` must hold 2 and `exact` 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn csg_model_levels(
    model: *const CsgModel,
    x: f64,
    z: f64,
    chirality_code: u32,
    reduced: *mut f64,
    exact: *mut f64,
) -> CsgStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(CsgStatus::NullPointer, "model is NULL");
        };
        if reduced.is_null() || exact.is_null() {
            return fail(CsgStatus::NullPointer, "output buffer is NULL");
        }
        let Some(c) = chirality(chirality_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown chirality code {chirality_code}"));
        };
        let eff = EffectiveTwoLevel::at(&m.inner, x, z, c);
        match exact_eigs(&full_three_level(&m.inner, x, z, c)) {
            Ok(e) => {
                *reduced = eff.eigenvalues.0;
                *reduced.add(1) = eff.eigenvalues.1;
                ptr::copy_nonoverlapping(e.as_ptr(), exact, 3);
                CsgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Advances one particle by `steps` RK4 steps of size `dt` (may be negative).
///
/// # Safety
/// `model` must be a live handle; `state` must be valid for reads and writes.
#[no_mangle]
pub unsafe extern "C" fn csg_propagate(
    model: *const CsgModel,
    species_code: u32,
    state: *mut CsgState,
    dt: f64,
    steps: u64,
) -> CsgStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), state.is_null()) else {
            return fail(CsgStatus::NullPointer, "model or state is NULL");
        };
        let Some(sp) = species(species_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown species code {species_code}"));
        };
        if !dt.is_finite() {
            return fail(CsgStatus::InvalidArgument, "dt must be finite");
        }
        match propagate((*state).into(), sp, &m.inner, dt, steps) {
            Ok(s) => {
                *state = s.into();
                CsgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the four-species experiment. `times` lists the snapshot times in
/// simulation units (ascending, first 0, last = `t_final`). Free the result
/// with [`csg_result_free`].
///
/// # Safety
/// `model` must be a live handle, `times` valid for `n_times` reads and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_simulate(
    model: *const CsgModel,
    particles_per_species: u64,
    sigma_r: f64,
    seed: u64,
    dt: f64,
    times: *const f64,
    n_times: usize,
    out: *mut *mut CsgResult,
) -> CsgStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(CsgStatus::NullPointer, "model is NULL");
        };
        if out.is_null() || (times.is_null() && n_times > 0) {
            return fail(CsgStatus::NullPointer, "out or times is NULL");
        }
        *out = ptr::null_mut();
        let snapshot_times = if n_times == 0 { Vec::new() } else { std::slice::from_raw_parts(times, n_times).to_vec() };
        let integ = IntegratorConfig {
            dt,
            t_final: snapshot_times.last().copied().unwrap_or(0.0),
            snapshot_times,
        };
        let ens = EnsembleConfig {
            particles_per_species: particles_per_species as usize,
            sigma_r,
            seed,
            ..Default::default()
        };
        match run_experiment(&m.inner, &ens, &integ) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CsgResult { inner }));
                CsgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a result. NULL is ignored.
///
/// # Safety
/// `result` must be NULL or a pointer from [`csg_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csg_result_free(result: *mut CsgResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of snapshots, 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn csg_result_snapshot_count(result: *const CsgResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.snapshots.len())
}

/// Time and record count of snapshot `index`.
///
/// # Safety
/// `result` must be a live handle; `time` and `records` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_result_snapshot_info(
    result: *const CsgResult,
    index: usize,
    time: *mut f64,
    records: *mut usize,
) -> CsgStatus {
    guard(|| {
        let Some(r) = result.as_ref() else {
            return fail(CsgStatus::NullPointer, "result is NULL");
        };
        if time.is_null() || records.is_null() {
            return fail(CsgStatus::NullPointer, "output is NULL");
        }
        let Some(s) = r.inner.snapshots.get(index) else {
            return fail(CsgStatus::OutOfRange, format!("snapshot {index} out of range"));
        };
        *time = s.time;
        *records = s.records.len();
        CsgStatus::Ok
    })
}

/// Copies the records of snapshot `index` into `buf`, which must hold at
/// least the count reported by [`csg_result_snapshot_info`].
///
/// # Safety
/// `result` must be a live handle; `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn csg_result_records(
    result: *const CsgResult,
    index: usize,
    buf: *mut CsgRecord,
    cap: usize,
) -> CsgStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), buf.is_null()) else {
            return fail(CsgStatus::NullPointer, "result or buf is NULL");
        };
        let Some(s) = r.inner.snapshots.get(index) else {
            return fail(CsgStatus::OutOfRange, format!("snapshot {index} out of range"));
        };
        if cap < s.records.len() {
            return fail(CsgStatus::OutOfRange, format!("buffer holds {cap}, need {}", s.records.len()));
        }
        for (i, rec) in s.records.iter().enumerate() {
            *buf.add(i) = CsgRecord {
                species: rec.species.code() as u32,
                particle_id: rec.particle_id as u64,
                state: rec.state.into(),
            };
        }
        CsgStatus::Ok
    })
}

/// Centroid (x̄, z̄) of one species at snapshot `index`.
///
/// # Safety
/// `result` must be a live handle; `x` and `z` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn csg_result_centroid(
    result: *const CsgResult,
    index: usize,
    species_code: u32,
    x: *mut f64,
    z: *mut f64,
) -> CsgStatus {
    guard(|| {
        let Some(r) = result.as_ref() else {
            return fail(CsgStatus::NullPointer, "result is NULL");
        };
        if x.is_null() || z.is_null() {
            return fail(CsgStatus::NullPointer, "output is NULL");
        }
        let Some(sp) = species(species_code) else {
            return fail(CsgStatus::InvalidArgument, format!("unknown species code {species_code}"));
        };
        let Some(s) = r.inner.snapshots.get(index) else {
            return fail(CsgStatus::OutOfRange, format!("snapshot {index} out of range"));
        };
        match separation_stats(s).get(sp) {
            Some(st) => {
                *x = st.centroid[0];
                *z = st.centroid[1];
                CsgStatus::Ok
            }
            None => fail(CsgStatus::InvalidArgument, format!("species {sp} not simulated")),
        }
    })
}

/// Species code of a chirality and spin (spin 0 up, 1 down).
#[no_mangle]
pub extern "C" fn csg_species_code(chirality_code: u32, spin: u32) -> u32 {
    let c = chirality(chirality_code).unwrap_or(Chirality::Left);
    let s = if spin == 0 { Spin::Up } else { Spin::Down };
    Species::new(c, s).code() as u32
}
