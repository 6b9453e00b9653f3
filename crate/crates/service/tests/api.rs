use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use eyefold::annotation::{annotated_retopo, AnnotationRecord, AnnotationWorkspace, SliderParams};
use eyefold::mesh::{load_obj, validate_topology};
use eyefold::synth::{gen_annotated_scans, gen_templates};
use eyefold_service::{router, ErrorBody, ExportResponse, MeshPayload, ScanSummary, ServiceConfig};
use http_body_util::BodyExt;
use serde::de::DeserializeOwned;
use tempfile::TempDir;
use tower::ServiceExt;

struct Fixture {
    _dir: TempDir,
    config: ServiceConfig,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let generated = gen_templates(dir.path().join("templates"), 10).unwrap();
    let data = gen_annotated_scans(dir.path().join("scans"), &generated.manifest, 3, 1).unwrap();
    let config = ServiceConfig {
        templates: generated.manifest,
        scans: data.scan_manifest,
        annotations: dir.path().join("state/annotations.ndjson"),
        export_dir: dir.path().join("exports"),
    };
    Fixture { _dir: dir, config }
}

fn app(config: &ServiceConfig) -> (Router, Arc<AnnotationWorkspace>) {
    let ws = Arc::new(config.open().unwrap());
    (router(Arc::clone(&ws)), ws)
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json<T: DeserializeOwned>(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, T) {
    let (status, bytes) = call(app, method, uri, body).await;
    (
        status,
        serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&bytes))),
    )
}

const ROUND_TRIP_BODY: &str = r#"{"u_global":0.3,"u_inner":0.7,"u_outer":0.2,"sharpen_strength":0.4,"sharpen_orientation_deg":10,"annotator":"ana"}"#;

#[tokio::test]
async fn lists_scans_in_manifest_order() {
    let f = fixture();
    let (app, _) = app(&f.config);
    let (status, scans): (_, Vec<ScanSummary>) = call_json(&app, Method::GET, "/scans", None).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<_> = scans.iter().map(|s| s.scan_id.as_str()).collect();
    assert_eq!(ids, ["scan_000", "scan_001", "scan_002"]);
    assert!(scans.iter().all(|s| !s.annotated));
}

#[tokio::test]
async fn scan_mesh_payload_matches_file() {
    let f = fixture();
    let (app, ws) = app(&f.config);
    let (status, payload): (_, MeshPayload) = call_json(&app, Method::GET, "/scans/scan_001/scan-mesh", None).await;
    assert_eq!(status, StatusCode::OK);
    let mesh = ws.scan_mesh("scan_001").unwrap();
    assert_eq!(payload, MeshPayload::from_mesh(&mesh));
}

#[tokio::test]
async fn zero_sliders_preview_is_non_hooded_template() {
    let f = fixture();
    let (app, ws) = app(&f.config);
    let uri = "/scans/scan_000/preview?u=0&u_inner=0&u_outer=0&sharpen=0&orient=0";
    let (status, payload): (_, MeshPayload) = call_json(&app, Method::GET, uri, None).await;
    assert_eq!(status, StatusCode::OK);
    let nh = &ws.templates().non_hooded;
    let expected: Vec<[f64; 3]> = nh.vertices.iter().map(|v| [v.x, v.y, v.z]).collect();
    assert_eq!(payload.vertices, expected);
    assert_eq!(payload.faces, nh.faces);
    assert_eq!(payload.crease_loop.as_ref(), Some(&ws.topology().crease_loop));
}

#[tokio::test]
async fn preview_equals_library_call() {
    let f = fixture();
    let (app, ws) = app(&f.config);
    let sliders = SliderParams::new(0.3, 0.7, 0.2, 0.4, 10.0);
    let uri = "/scans/scan_002/preview?u=0.3&u_inner=0.7&u_outer=0.2&sharpen=0.4&orient=10";
    let (_, payload): (_, MeshPayload) = call_json(&app, Method::GET, uri, None).await;
    let direct = annotated_retopo(ws.templates(), ws.topology(), &sliders).unwrap();
    assert_eq!(payload.vertices.len(), direct.vertex_count());
    for (p, q) in payload.vertices.iter().zip(&direct.vertices) {
        for i in 0..3 {
            assert!((p[i] - q[i]).abs() <= 1e-12);
        }
    }
    let (_, again): (_, MeshPayload) = call_json(&app, Method::GET, uri, None).await;
    assert_eq!(again, payload);
}

#[tokio::test]
async fn preview_errors_are_structured() {
    let f = fixture();
    let (app, _) = app(&f.config);
    let (status, body): (_, ErrorBody) = call_json(
        &app,
        Method::GET,
        "/scans/scan_000/preview?u=1.5&u_inner=0&u_outer=0&sharpen=0&orient=0",
        None,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body.kind, "DomainError");

    let (status, body): (_, ErrorBody) = call_json(&app, Method::GET, "/scans/scan_000/preview?u=0.5", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body.kind, "DomainError");

    let (status, body): (_, ErrorBody) = call_json(
        &app,
        Method::GET,
        "/scans/nope/preview?u=0&u_inner=0&u_outer=0&sharpen=0&orient=0",
        None,
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body.kind, "UnknownScan");
}

#[tokio::test]
async fn annotation_round_trip_and_last_write_wins() {
    let f = fixture();
    let (app, _) = app(&f.config);
    let (status, body): (_, ErrorBody) = call_json(&app, Method::GET, "/scans/scan_000/annotation", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body.kind, "NoAnnotation");

    let (status, stored): (_, AnnotationRecord) = call_json(
        &app,
        Method::PUT,
        "/scans/scan_000/annotation",
        Some(ROUND_TRIP_BODY.into()),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stored.sliders, SliderParams::new(0.3, 0.7, 0.2, 0.4, 10.0));
    assert_eq!(stored.scan_id, "scan_000");
    let (_, read): (_, AnnotationRecord) = call_json(&app, Method::GET, "/scans/scan_000/annotation", None).await;
    assert_eq!(read, stored);

    let second = ROUND_TRIP_BODY.replace("0.3", "0.9");
    let (_, newer): (_, AnnotationRecord) =
        call_json(&app, Method::PUT, "/scans/scan_000/annotation", Some(second)).await;
    let (_, read): (_, AnnotationRecord) = call_json(&app, Method::GET, "/scans/scan_000/annotation", None).await;
    assert_eq!(read, newer);
    assert_eq!(read.sliders.u_global, 0.9);

    let (_, scans): (_, Vec<ScanSummary>) = call_json(&app, Method::GET, "/scans", None).await;
    assert!(scans[0].annotated && !scans[1].annotated);
}

#[tokio::test]
async fn saved_annotation_survives_restart() {
    let f = fixture();
    let stored: AnnotationRecord = {
        let (app, _) = app(&f.config);
        call_json(
            &app,
            Method::PUT,
            "/scans/scan_001/annotation",
            Some(ROUND_TRIP_BODY.into()),
        )
        .await
        .1
    };
    let (app, _) = app(&f.config);
    let (status, read): (_, AnnotationRecord) = call_json(&app, Method::GET, "/scans/scan_001/annotation", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(read, stored);
}

#[tokio::test]
async fn invalid_annotations_are_rejected() {
    let f = fixture();
    let (app, _) = app(&f.config);
    let bad_range = ROUND_TRIP_BODY.replace(r#""u_inner":0.7"#, r#""u_inner":-0.1"#);
    let mismatched = ROUND_TRIP_BODY.replace('{', r#"{"scan_id":"scan_002","#);
    let bad_time = ROUND_TRIP_BODY.replace('}', r#","timestamp":"yesterday"}"#);
    for body in [bad_range, mismatched, bad_time, "not json".to_string()] {
        let (status, err): (_, ErrorBody) =
            call_json(&app, Method::PUT, "/scans/scan_000/annotation", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(err.kind, "ValidationError");
    }
    let (status, err): (_, ErrorBody) = call_json(
        &app,
        Method::PUT,
        "/scans/ghost/annotation",
        Some(ROUND_TRIP_BODY.into()),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err.kind, "UnknownScan");
    let (_, scans): (_, Vec<ScanSummary>) = call_json(&app, Method::GET, "/scans", None).await;
    assert!(scans.iter().all(|s| !s.annotated));
}

#[tokio::test]
async fn export_writes_deterministic_valid_obj() {
    let f = fixture();
    let (app, ws) = app(&f.config);
    let (status, err): (_, ErrorBody) = call_json(&app, Method::POST, "/scans/scan_002/export", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err.kind, "NoAnnotation");

    call(
        &app,
        Method::PUT,
        "/scans/scan_002/annotation",
        Some(ROUND_TRIP_BODY.into()),
    )
    .await;
    let (status, out): (_, ExportResponse) = call_json(&app, Method::POST, "/scans/scan_002/export", None).await;
    assert_eq!(status, StatusCode::OK);
    let first = std::fs::read(&out.path).unwrap();
    call(&app, Method::POST, "/scans/scan_002/export", None).await;
    assert_eq!(std::fs::read(&out.path).unwrap(), first);
    let mesh = load_obj(&out.path).unwrap();
    assert!(validate_topology(&mesh, ws.topology()).is_empty());
}

#[tokio::test]
async fn duplicate_scan_ids_fail_at_startup() {
    let f = fixture();
    let text = std::fs::read_to_string(&f.config.scans).unwrap();
    let mut entries: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    entries.push(entries[0].clone());
    std::fs::write(&f.config.scans, serde_json::to_string(&entries).unwrap()).unwrap();
    assert!(f.config.open().is_err());
}

#[tokio::test]
async fn empty_manifest_lists_nothing() {
    let f = fixture();
    std::fs::write(&f.config.scans, "[]").unwrap();
    let (app, _) = app(&f.config);
    let (_, scans): (_, Vec<ScanSummary>) = call_json(&app, Method::GET, "/scans", None).await;
    assert!(scans.is_empty());
}
