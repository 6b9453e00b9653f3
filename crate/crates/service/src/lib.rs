//! HTTP front end for an [`AnnotationWorkspace`]: scan listing, slider
//! previews, annotation storage and final retopo export.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use eyefold::annotation::{now_timestamp, AnnotationRecord, AnnotationWorkspace, SliderParams};
use eyefold::{Error, Mesh};
use serde::{Deserialize, Serialize};

/// File locations for one service instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ServiceConfig {
    pub templates: PathBuf,
    pub scans: PathBuf,
    pub annotations: PathBuf,
    pub export_dir: PathBuf,
}

impl ServiceConfig {
    /// Conventional layout: `templates.json`, `scans.json`,
    /// `annotations.ndjson` and `exports/` inside `dir`.
    pub fn from_data_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            templates: dir.join("templates.json"),
            scans: dir.join("scans.json"),
            annotations: dir.join("annotations.ndjson"),
            export_dir: dir.join("exports"),
        }
    }

    pub fn open(&self) -> eyefold::Result<AnnotationWorkspace> {
        AnnotationWorkspace::open(&self.templates, &self.scans, &self.annotations, &self.export_dir)
    }
}

/// Vertices and faces of a mesh as JSON arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshPayload {
    pub name: String,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crease_loop: Option<Vec<usize>>,
}

impl MeshPayload {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        Self {
            name: mesh.name.clone(),
            vertices: mesh.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
            faces: mesh.faces.clone(),
            crease_loop: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub scan_id: String,
    pub display_name: String,
    pub annotated: bool,
}

/// Body of `PUT /scans/{id}/annotation`. A missing `scan_id` defaults to
/// the path id and a missing timestamp to the time of receipt.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationBody {
    scan_id: Option<String>,
    u_global: f64,
    u_inner: f64,
    u_outer: f64,
    sharpen_strength: f64,
    sharpen_orientation_deg: f64,
    annotator: String,
    timestamp: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportResponse {
    pub scan_id: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub kind: String,
}

/// Library error rendered as `{"error", "kind"}` with a matching status.
#[derive(Debug)]
pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::UnknownScan(_) | Error::NoAnnotation(_) => StatusCode::NOT_FOUND,
            Error::Domain(_) | Error::Validation(_) | Error::Schema(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        let body = ErrorBody {
            error: self.0.to_string(),
            kind: self.0.kind().to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Shared = Arc<AnnotationWorkspace>;

pub fn router(workspace: Shared) -> Router {
    Router::new()
        .route("/scans", get(list_scans))
        .route("/scans/{id}/scan-mesh", get(scan_mesh))
        .route("/scans/{id}/preview", get(preview))
        .route("/scans/{id}/annotation", get(get_annotation).put(put_annotation))
        .route("/scans/{id}/export", post(export))
        .with_state(workspace)
}

async fn list_scans(State(ws): State<Shared>) -> ApiResult<Vec<ScanSummary>> {
    let snapshot = ws.store().snapshot();
    Ok(Json(
        ws.scans()
            .entries()
            .iter()
            .map(|e| ScanSummary {
                scan_id: e.scan_id.clone(),
                display_name: e.display_name.clone(),
                annotated: snapshot.contains_key(&e.scan_id),
            })
            .collect(),
    ))
}

async fn scan_mesh(State(ws): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<MeshPayload> {
    let mesh = run_blocking(move || ws.scan_mesh(&id)).await?;
    Ok(Json(MeshPayload::from_mesh(&mesh)))
}

fn query_value(query: &HashMap<String, String>, key: &str) -> Result<f64, Error> {
    let raw = query
        .get(key)
        .ok_or_else(|| Error::Domain(format!("missing query parameter {key:?}")))?;
    raw.parse()
        .map_err(|_| Error::Domain(format!("query parameter {key}={raw:?} is not a number")))
}

/// Slider values from `u`, `u_inner`, `u_outer`, `sharpen` and `orient`.
pub fn sliders_from_query(query: &HashMap<String, String>) -> Result<SliderParams, Error> {
    let sliders = SliderParams::new(
        query_value(query, "u")?,
        query_value(query, "u_inner")?,
        query_value(query, "u_outer")?,
        query_value(query, "sharpen")?,
        query_value(query, "orient")?,
    );
    sliders.validate()?;
    Ok(sliders)
}

async fn preview(
    State(ws): State<Shared>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<MeshPayload> {
    ws.scans().get(&id)?;
    let sliders = sliders_from_query(&query)?;
    let mesh = ws.preview(&id, &sliders)?;
    let mut payload = MeshPayload::from_mesh(&mesh);
    payload.crease_loop = Some(ws.topology().crease_loop.clone());
    Ok(Json(payload))
}

async fn get_annotation(State(ws): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<AnnotationRecord> {
    let record = ws.annotation(&id)?.ok_or(Error::NoAnnotation(id))?;
    Ok(Json(record))
}

async fn put_annotation(
    State(ws): State<Shared>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<AnnotationRecord> {
    ws.scans().get(&id)?;
    let body: AnnotationBody =
        serde_json::from_slice(&body).map_err(|e| Error::Validation(format!("annotation body: {e}")))?;
    let scan_id = body.scan_id.unwrap_or_else(|| id.clone());
    if scan_id != id {
        return Err(Error::Validation(format!("body scan_id {scan_id:?} does not match path {id:?}")).into());
    }
    let record = AnnotationRecord {
        scan_id,
        sliders: SliderParams::new(
            body.u_global,
            body.u_inner,
            body.u_outer,
            body.sharpen_strength,
            body.sharpen_orientation_deg,
        ),
        annotator: body.annotator,
        timestamp: body.timestamp.unwrap_or_else(now_timestamp),
    };
    let stored = run_blocking(move || ws.save_annotation(record)).await?;
    Ok(Json(stored))
}

async fn export(State(ws): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<ExportResponse> {
    let scan_id = id.clone();
    let path = run_blocking(move || ws.export_final_retopo(&id)).await?;
    Ok(Json(ExportResponse { scan_id, path }))
}

async fn run_blocking<T: Send + 'static>(
    f: impl FnOnce() -> eyefold::Result<T> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .expect("blocking task panicked")
        .map_err(ApiError)
}

/// Serves `workspace` on `addr` until Ctrl-C.
pub async fn serve(workspace: AnnotationWorkspace, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(workspace)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// [`serve`] on a fresh multi-threaded runtime.
pub fn serve_blocking(workspace: AnnotationWorkspace, addr: SocketAddr) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(workspace, addr))
}
