//! HTTP frame service: renders the loaded scene from any camera on request.
//!
//! `GET /render?px=..&py=..` returns a PNG, `GET /meta` describes the scene,
//! `GET /healthz` answers `ok`. Renders run on the blocking pool, at most
//! `max_concurrent` at a time; later requests wait in arrival order.

mod request;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::Semaphore;
use tower_http::services::ServeDir;
use vss_core::pipeline::{render_scene, SceneInput};
use vss_core::scene::Mesh;

pub use request::{Bounds, FrameRequest, ParamError, MAX_EDGE};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("scene: {0}")]
    Scene(#[from] vss_core::Error),
    #[error("server: {0}")]
    Serve(#[source] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServiceOptions {
    pub max_concurrent: usize,
    /// Served at `/` when set (the browser viewer's build output).
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions {
            max_concurrent: 2,
            static_dir: None,
        }
    }
}

/// Shared, read-only scene plus the render queue.
pub struct AppState {
    scene: Arc<SceneInput>,
    bounds: Bounds,
    vertex_count: usize,
    triangle_count: usize,
    has_attribute: bool,
    defaults: FrameRequest,
    permits: Arc<Semaphore>,
    in_flight: Arc<AtomicUsize>,
    peak: Arc<AtomicUsize>,
    static_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(mesh: Mesh, opts: &ServiceOptions) -> Result<Self, ServiceError> {
        mesh.validate()?;
        let (min, max) = mesh.bounds().ok_or(vss_core::Error::EmptyScene)?;
        Ok(AppState {
            bounds: Bounds { min, max },
            vertex_count: mesh.vertices.len(),
            triangle_count: mesh.triangles.len(),
            has_attribute: mesh.attribute.is_some(),
            defaults: FrameRequest::defaults_for(&mesh),
            scene: Arc::new(SceneInput::Mesh(mesh)),
            permits: Arc::new(Semaphore::new(opts.max_concurrent.max(1))),
            in_flight: Arc::new(AtomicUsize::new(0)),
            peak: Arc::new(AtomicUsize::new(0)),
            static_dir: opts.static_dir.clone(),
        })
    }

    pub fn defaults(&self) -> &FrameRequest {
        &self.defaults
    }

    /// Largest number of renders that ever ran at once.
    pub fn peak_concurrency(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }
}

fn error_json(status: StatusCode, body: serde_json::Value) -> Response {
    (status, Json(body)).into_response()
}

fn bad_param(e: &ParamError) -> Response {
    error_json(
        StatusCode::BAD_REQUEST,
        json!({ "error": e.to_string(), "param": e.param, "reason": e.reason }),
    )
}

async fn meta(State(st): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({
        "bbox": st.bounds,
        "vertex_count": st.vertex_count,
        "triangle_count": st.triangle_count,
        "has_attribute": st.has_attribute,
        "defaults": st.defaults,
        "max_edge": MAX_EDGE,
    }))
}

async fn render(
    State(st): State<Arc<AppState>>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> Response {
    let pairs = match query {
        Ok(Query(p)) => p,
        Err(e) => {
            return bad_param(&ParamError {
                param: "query".into(),
                reason: e.body_text(),
            })
        }
    };
    let req = match FrameRequest::from_query(&pairs, &st.defaults) {
        Ok(r) => r,
        Err(e) => return bad_param(&e),
    };
    let params = req.frame_params(&st.bounds);

    // Fair semaphore: waiters are served in arrival order.
    let permit = st
        .permits
        .clone()
        .acquire_owned()
        .await
        .expect("render semaphore is never closed");
    let scene = st.scene.clone();
    let in_flight = st.in_flight.clone();
    let peak = st.peak.clone();
    let job = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        let now = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        peak.fetch_max(now, Ordering::SeqCst);
        let out =
            render_scene(&scene, &params).and_then(|frame| {
                let png = frame.image.encode_png().map_err(|source| {
                    vss_core::pipeline::PipelineError {
                        stage: "encode",
                        source,
                    }
                })?;
                Ok((png, frame.stats))
            });
        in_flight.fetch_sub(1, Ordering::SeqCst);
        out
    });
    match job.await {
        Ok(Ok((png, stats))) => (
            [
                (header::CONTENT_TYPE, "image/png".to_string()),
                (header::CACHE_CONTROL, "public, max-age=3600".to_string()),
                (
                    header::HeaderName::from_static("x-render-ms"),
                    format!("{:.1}", stats.total_ms),
                ),
                (
                    header::HeaderName::from_static("x-void-regions"),
                    stats.region_count.to_string(),
                ),
            ],
            png,
        )
            .into_response(),
        Ok(Err(e)) => {
            log::warn!("render failed: {e}");
            error_json(
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({ "error": e.source.to_string(), "stage": e.stage }),
            )
        }
        Err(e) => error_json(
            StatusCode::INTERNAL_SERVER_ERROR,
            json!({ "error": e.to_string(), "stage": "render" }),
        ),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.static_dir.clone();
    let routes = Router::new()
        .route("/meta", get(meta))
        .route("/render", get(render))
        .route("/healthz", get(|| async { "ok" }));
    let routes = match static_dir {
        Some(dir) => routes.fallback_service(ServeDir::new(dir)),
        None => routes,
    };
    routes.with_state(state)
}

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServiceError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })
}

/// Serves until the process is terminated.
pub async fn run(listener: TcpListener, state: Arc<AppState>) -> Result<(), ServiceError> {
    if let Ok(addr) = listener.local_addr() {
        log::info!("listening on http://{addr}");
    }
    axum::serve(listener, router(state))
        .await
        .map_err(ServiceError::Serve)
}
