//! JSON-over-HTTP what-if API over an immutable artifact snapshot.
//!
//! Scoring and sensitivity requests are recomputed from the snapshot's
//! cached simulation statistics; nothing is re-simulated per request. A
//! recompute swaps in a whole new snapshot, so concurrent readers always see
//! one consistent artifact.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use simcda_core::config::PipelineConfig;
use simcda_core::mcda::{normalize, static_view, weighted_totals, CriteriaMatrix, NormalizedMatrix, Score, WeightVector};
use simcda_core::pipeline::{run_pipeline, RunArtifact, SimulationSource};
use simcda_core::port_sim::Execution;
use simcda_core::ranking::{Method, RankingOutcome};
use simcda_core::sensitivity::{run_analysis, PerturbationConfig, SensitivityReport, Variant};
use simcda_core::Error;

pub const CONFIG_HASH_HEADER: &str = "x-config-hash";

/// Upper bound on iterations per sensitivity request.
pub const MAX_ITERATIONS: u32 = 1_000_000;

#[derive(Clone)]
pub struct AppState {
    snapshot: Arc<RwLock<Arc<RunArtifact>>>,
}

impl AppState {
    pub fn new(artifact: RunArtifact) -> Self {
        Self {
            snapshot: Arc::new(RwLock::new(Arc::new(artifact))),
        }
    }

    pub fn current(&self) -> Arc<RunArtifact> {
        self.snapshot.read().expect("snapshot lock poisoned").clone()
    }

    /// Atomically replace the served artifact.
    pub fn replace(&self, artifact: RunArtifact) {
        *self.snapshot.write().expect("snapshot lock poisoned") = Arc::new(artifact);
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/artifact", get(artifact))
        .route("/api/config", get(config))
        .route("/api/simulation", get(simulation))
        .route("/api/score", post(score))
        .route("/api/score/matrix", post(score_matrix))
        .route("/api/sensitivity", post(sensitivity))
        .route("/api/recompute", post(recompute))
        .with_state(state)
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
    config_hash: String,
}

impl ApiError {
    fn bad_request(hash: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                kind: "bad_request",
                message: message.into(),
                field: None,
            },
            config_hash: hash.to_string(),
        }
    }

    fn internal(hash: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                kind: "runtime",
                message: message.into(),
                field: None,
            },
            config_hash: hash.to_string(),
        }
    }

    fn validation(hash: &str, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: ErrorBody {
                kind: "validation",
                message: message.into(),
                field: Some(field.into()),
            },
            config_hash: hash.to_string(),
        }
    }

    fn from_core(hash: &str, e: Error) -> Self {
        let field = match &e {
            Error::Validation { field, .. } => Some(field.clone()),
            Error::Stage { source, .. } => match source.as_ref() {
                Error::Validation { field, .. } => Some(field.clone()),
                _ => None,
            },
            _ => None,
        };
        let (status, kind) = if e.is_validation() {
            (StatusCode::UNPROCESSABLE_ENTITY, "validation")
        } else {
            (StatusCode::INTERNAL_SERVER_ERROR, "runtime")
        };
        Self {
            status,
            body: ErrorBody {
                kind,
                message: e.to_string(),
                field,
            },
            config_hash: hash.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "config_hash": self.config_hash, "error": self.body });
        with_hash(self.status, &self.config_hash, body)
    }
}

fn with_hash(status: StatusCode, hash: &str, body: serde_json::Value) -> Response {
    let mut r = (status, Json(body)).into_response();
    if let Ok(v) = HeaderValue::from_str(hash) {
        r.headers_mut().insert(CONFIG_HASH_HEADER, v);
    }
    r
}

fn ok<T: Serialize>(hash: &str, data: T) -> Response {
    with_hash(StatusCode::OK, hash, json!({ "config_hash": hash, "data": data }))
}

fn parse<T: DeserializeOwned>(hash: &str, body: &Bytes) -> Result<T, ApiError> {
    let text: &[u8] = if body.is_empty() { b"{}" } else { body };
    serde_json::from_slice(text).map_err(|e| ApiError::bad_request(hash, format!("malformed request body: {e}")))
}

async fn artifact(State(state): State<AppState>) -> Response {
    let a = state.current();
    ok(&a.provenance.config_hash, a.as_ref())
}

async fn config(State(state): State<AppState>) -> Response {
    let a = state.current();
    ok(&a.provenance.config_hash, &a.config)
}

#[derive(Serialize)]
struct SimulationView<'a> {
    cells: &'a [simcda_core::port_sim::SimCell],
    expected: &'a BTreeMap<u32, simcda_core::port_sim::SimStats>,
    source: &'a str,
}

async fn simulation(State(state): State<AppState>) -> Response {
    let a = state.current();
    ok(
        &a.provenance.config_hash,
        SimulationView {
            cells: &a.simulation.cells,
            expected: &a.scoring.expected_stats,
            source: &a.provenance.simulation_source,
        },
    )
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreRequest {
    /// Weight per criterion id; defaults to the configured weights.
    pub weights: Option<BTreeMap<String, f64>>,
    /// Defaults to dynamic MCDA.
    pub method: Option<Method>,
}

#[derive(Debug, Serialize)]
pub struct ScoreResponse {
    pub ranking: RankingOutcome,
    pub weights: WeightVector,
}

fn weights_or_default(hash: &str, a: &RunArtifact, w: Option<BTreeMap<String, f64>>) -> Result<WeightVector, ApiError> {
    match w {
        None => Ok(a.config.criteria.weights.clone()),
        Some(map) => {
            let w = WeightVector { weights: map };
            w.validate("weights").map_err(|e| ApiError::from_core(hash, e))?;
            Ok(w)
        }
    }
}

fn rank(
    raw: &CriteriaMatrix,
    normalized: &NormalizedMatrix,
    weights: &WeightVector,
    method: Method,
    a: &RunArtifact,
) -> Result<RankingOutcome, Error> {
    match method {
        Method::Cba => Ok(a.scoring.cba.clone()),
        Method::DynamicMcda => weighted_totals(normalized, weights, Method::DynamicMcda),
        Method::StaticMcda => {
            let (reduced, reduced_weights) = static_view(raw, weights)?;
            weighted_totals(
                &normalize(&reduced, a.config.criteria.monetary_scoring)?,
                &reduced_weights,
                Method::StaticMcda,
            )
        }
    }
}

async fn score(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let a = state.current();
    let hash = &a.provenance.config_hash;
    let req: ScoreRequest = parse(hash, &body)?;
    let weights = weights_or_default(hash, &a, req.weights)?;
    let method = req.method.unwrap_or(Method::DynamicMcda);
    let ranking = rank(&a.scoring.raw, &a.scoring.normalized, &weights, method, &a)
        .map_err(|e| ApiError::from_core(hash, e))?;
    Ok(ok(hash, ScoreResponse { ranking, weights }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellOverride {
    pub option: u32,
    pub criterion: String,
    pub value: Score,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixRequest {
    pub overrides: Vec<CellOverride>,
    pub weights: Option<BTreeMap<String, f64>>,
    pub method: Option<Method>,
}

#[derive(Debug, Serialize)]
pub struct MatrixResponse {
    pub raw: CriteriaMatrix,
    pub normalized: NormalizedMatrix,
    pub ranking: RankingOutcome,
}

async fn score_matrix(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let a = state.current();
    let hash = &a.provenance.config_hash;
    let req: MatrixRequest = parse(hash, &body)?;
    let weights = weights_or_default(hash, &a, req.weights)?;
    let mut raw = a.scoring.raw.clone();
    for (i, o) in req.overrides.iter().enumerate() {
        let row = raw
            .options
            .iter()
            .position(|x| *x == o.option)
            .ok_or_else(|| ApiError::validation(hash, format!("overrides[{i}].option"), format!("unknown option {}", o.option)))?;
        let col = raw.criterion_index(&o.criterion).ok_or_else(|| {
            ApiError::validation(hash, format!("overrides[{i}].criterion"), format!("unknown criterion {:?}", o.criterion))
        })?;
        raw.values[row][col] = o.value;
    }
    let normalized = normalize(&raw, a.config.criteria.monetary_scoring).map_err(|e| ApiError::from_core(hash, e))?;
    let method = req.method.unwrap_or(Method::DynamicMcda);
    let ranking = rank(&raw, &normalized, &weights, method, &a).map_err(|e| ApiError::from_core(hash, e))?;
    Ok(ok(
        hash,
        MatrixResponse {
            raw,
            normalized,
            ranking,
        },
    ))
}

/// Any field left out takes the configured sensitivity setting.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityRequest {
    pub variant: Option<Variant>,
    pub amplitude: Option<f64>,
    pub iterations: Option<u32>,
    pub frozen_criteria: Option<BTreeSet<String>>,
    pub clamp_floor: Option<f64>,
    pub seed: Option<u64>,
    pub renormalize: Option<bool>,
    pub weights: Option<BTreeMap<String, f64>>,
}

async fn sensitivity(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let a = state.current();
    let hash = a.provenance.config_hash.clone();
    let req: SensitivityRequest = parse(&hash, &body)?;
    let weights = weights_or_default(&hash, &a, req.weights)?;
    let base = a.config.sensitivity.for_variant(req.variant.unwrap_or_default());
    let cfg = PerturbationConfig {
        variant: base.variant,
        amplitude: req.amplitude.unwrap_or(base.amplitude),
        iterations: req.iterations.unwrap_or(base.iterations),
        frozen_criteria: req.frozen_criteria.or(base.frozen_criteria),
        clamp_floor: req.clamp_floor.unwrap_or(base.clamp_floor),
        seed: req.seed.unwrap_or(base.seed),
        renormalize: req.renormalize.unwrap_or(base.renormalize),
    };
    if cfg.iterations > MAX_ITERATIONS {
        return Err(ApiError::validation(
            &hash,
            "iterations",
            format!("at most {MAX_ITERATIONS} iterations per request"),
        ));
    }
    let snapshot = a.clone();
    let report: SensitivityReport = tokio::task::spawn_blocking(move || {
        run_analysis(&snapshot.scoring.normalized, &weights, &cfg, Execution::Parallel)
    })
    .await
    .map_err(|e| ApiError::internal(&hash, e.to_string()))?
    .map_err(|e| ApiError::from_core(&hash, e))?;
    Ok(ok(&hash, report))
}

/// Re-score with a new configuration against the cached simulation table
/// and swap the snapshot. Options and scenario values must match the table.
async fn recompute(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let current = state.current();
    let hash = current.provenance.config_hash.clone();
    let mut config: PipelineConfig = parse(&hash, &body)?;
    config.output_directory = current.config.output_directory.clone();
    config.validate().map_err(|e| ApiError::from_core(&hash, e))?;
    let scenarios = config.scenario_set().map_err(|e| ApiError::from_core(&hash, e))?;
    for s in scenarios.scenarios() {
        let matches = current
            .simulation
            .cells
            .iter()
            .any(|c| c.scenario.id == s.id && c.scenario.vtg == s.vtg && c.scenario.ltp == s.ltp);
        if !matches {
            return Err(ApiError::validation(
                &hash,
                "vtg",
                format!("scenario {} (vtg {}, ltp {}) is not in the cached simulation; re-run the pipeline", s.id, s.vtg, s.ltp),
            ));
        }
    }
    let table = current.simulation.clone();
    let mut artifact = tokio::task::spawn_blocking(move || run_pipeline(&config, SimulationSource::Injected(table)))
        .await
        .map_err(|e| ApiError::internal(&hash, e.to_string()))?
        .map_err(|e| ApiError::from_core(&hash, e))?;
    // The statistics still come from the original run.
    artifact.provenance.simulation_source = current.provenance.simulation_source.clone();
    let new_hash = artifact.provenance.config_hash.clone();
    let provenance = artifact.provenance.clone();
    state.replace(artifact);
    Ok(ok(&new_hash, provenance))
}

/// Bind and serve until Ctrl-C.
pub async fn serve(state: AppState, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
