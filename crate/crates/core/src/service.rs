//! HTTP facade: upload an image once, analyze many ROIs against it.
//!
//! ```text
//! POST /api/v1/images               raw PNG/PPM body or multipart  -> 201 {"session","width","height"}
//! POST /api/v1/images/{id}/analyze  {"roi":{x,y,w,h},"thresholds":{..}} -> 200 report
//! GET  /healthz                                                     -> 200
//! ```

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::{to_bytes, Bytes};
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Path, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::classifier::ClassificationThresholds;
use crate::config::AnalysisConfig;
use crate::pipeline::{analyze_roi, AnalysisError};
use crate::raster::{decode_image, RasterError, RasterImage, Roi};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);
pub const DEFAULT_MAX_UPLOAD: usize = 32 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    pub max_upload_bytes: usize,
    pub analysis: AnalysisConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            max_upload_bytes: DEFAULT_MAX_UPLOAD,
            analysis: AnalysisConfig::default(),
        }
    }
}

struct Session {
    image: Arc<RasterImage>,
    #[allow(dead_code)]
    created: Instant,
    last_access: Mutex<Instant>,
}

impl Session {
    fn expired(&self, now: Instant, timeout: Duration) -> bool {
        let last = *self.last_access.lock().expect("session clock poisoned");
        now.duration_since(last) > timeout
    }
}

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Session>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState { config, sessions: RwLock::new(HashMap::new()) }
    }

    fn insert(&self, image: RasterImage) -> String {
        let now = Instant::now();
        let id = uuid::Uuid::new_v4().simple().to_string();
        let mut sessions = self.sessions.write().expect("session table poisoned");
        sessions.retain(|_, s| !s.expired(now, self.config.idle_timeout));
        sessions.insert(
            id.clone(),
            Session { image: Arc::new(image), created: now, last_access: Mutex::new(now) },
        );
        id
    }

    /// Looks up a live session and refreshes its idle clock.
    fn image(&self, id: &str) -> Option<Arc<RasterImage>> {
        let now = Instant::now();
        {
            let sessions = self.sessions.read().expect("session table poisoned");
            let session = sessions.get(id)?;
            if !session.expired(now, self.config.idle_timeout) {
                *session.last_access.lock().expect("session clock poisoned") = now;
                return Some(Arc::clone(&session.image));
            }
        }
        self.sessions.write().expect("session table poisoned").remove(id);
        None
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session table poisoned").len()
    }
}

pub fn router(config: ServiceConfig) -> Router {
    let limit = config.max_upload_bytes;
    Router::new()
        .route("/healthz", get(healthz))
        .route("/api/v1/images", post(upload))
        .route("/api/v1/images/{id}/analyze", post(analyze))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(Arc::new(AppState::new(config)))
}

pub async fn serve(addr: &str, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct UploadResponse {
    pub session: String,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoiBody {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeRequest {
    pub roi: RoiBody,
    #[serde(default)]
    pub thresholds: Option<ThresholdOverrides>,
}

/// Partial thresholds applied over the service defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    pub compactness_gate: Option<f64>,
    pub spacing_gate: Option<f64>,
    pub healthy_white_min: Option<f64>,
    pub healthy_white_max: Option<f64>,
    pub annulocyte_white_min: Option<f64>,
    pub sickle_red_min: Option<f64>,
    pub ncc_sickle: Option<u32>,
}

impl ThresholdOverrides {
    pub fn apply(&self, base: ClassificationThresholds) -> ClassificationThresholds {
        ClassificationThresholds {
            compactness_gate: self.compactness_gate.unwrap_or(base.compactness_gate),
            spacing_gate: self.spacing_gate.unwrap_or(base.spacing_gate),
            healthy_white_min: self.healthy_white_min.unwrap_or(base.healthy_white_min),
            healthy_white_max: self.healthy_white_max.unwrap_or(base.healthy_white_max),
            annulocyte_white_min: self.annulocyte_white_min.unwrap_or(base.annulocyte_white_min),
            sickle_red_min: self.sickle_red_min.unwrap_or(base.sickle_red_min),
            ncc_sickle: self.ncc_sickle.unwrap_or(base.ncc_sickle),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub kind: String,
}

fn error(status: StatusCode, kind: &str, message: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: message.into(), kind: kind.to_string() })).into_response()
}

async fn healthz() -> &'static str {
    "ok"
}

const ACCEPTED_TYPES: [&str; 3] = ["image/png", "image/x-portable-pixmap", "application/octet-stream"];

async fn upload(State(state): State<Arc<AppState>>, headers: HeaderMap, req: Request) -> Response {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.split(';').next().unwrap_or("").trim().to_ascii_lowercase());

    let bytes = match content_type.as_deref() {
        Some("multipart/form-data") => match first_multipart_file(req, &state).await {
            Ok(b) => b,
            Err(resp) => return resp,
        },
        Some(ct) if !ACCEPTED_TYPES.contains(&ct) => {
            return error(
                StatusCode::UNSUPPORTED_MEDIA_TYPE,
                "UnsupportedFormat",
                format!("content type {ct} is not image/png or image/x-portable-pixmap"),
            );
        }
        _ => match to_bytes(req.into_body(), state.config.max_upload_bytes).await {
            Ok(b) => b,
            Err(_) => return too_large(&state),
        },
    };

    match decode_image(&bytes) {
        Ok(img) => {
            let (width, height) = (img.width(), img.height());
            let session = state.insert(img);
            (StatusCode::CREATED, Json(UploadResponse { session, width, height })).into_response()
        }
        Err(RasterError::UnsupportedFormat) => {
            error(StatusCode::UNSUPPORTED_MEDIA_TYPE, "UnsupportedFormat", "body is not a PNG or P6 PPM image")
        }
        Err(e) => error(StatusCode::BAD_REQUEST, "CorruptFile", e.to_string()),
    }
}

fn too_large(state: &AppState) -> Response {
    error(
        StatusCode::PAYLOAD_TOO_LARGE,
        "TooLarge",
        format!("upload exceeds {} bytes", state.config.max_upload_bytes),
    )
}

async fn first_multipart_file(req: Request, state: &Arc<AppState>) -> Result<Bytes, Response> {
    let mut multipart = Multipart::from_request(req, state)
        .await
        .map_err(|e| error(StatusCode::BAD_REQUEST, "BadMultipart", e.body_text()))?;
    loop {
        match multipart.next_field().await {
            Ok(Some(field)) => {
                let mime = field.content_type().map(str::to_ascii_lowercase);
                if let Some(ct) = mime.as_deref().filter(|ct| !ACCEPTED_TYPES.contains(ct)) {
                    return Err(error(
                        StatusCode::UNSUPPORTED_MEDIA_TYPE,
                        "UnsupportedFormat",
                        format!("part content type {ct} is not an accepted image type"),
                    ));
                }
                return field.bytes().await.map_err(|e| {
                    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
                        too_large(state)
                    } else {
                        error(StatusCode::BAD_REQUEST, "BadMultipart", e.body_text())
                    }
                });
            }
            Ok(None) => {
                return Err(error(StatusCode::BAD_REQUEST, "BadMultipart", "multipart body has no parts"))
            }
            Err(e) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => return Err(too_large(state)),
            Err(e) => return Err(error(StatusCode::BAD_REQUEST, "BadMultipart", e.body_text())),
        }
    }
}

async fn analyze(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Response {
    let Some(image) = state.image(&id) else {
        return error(StatusCode::NOT_FOUND, "UnknownSession", format!("no live session {id}"));
    };
    let request: AnalyzeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()),
    };
    let roi = match Roi::new(request.roi.x, request.roi.y, request.roi.w, request.roi.h) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, "EmptyRoi", e.to_string()),
    };
    let mut config = state.config.analysis;
    if let Some(o) = &request.thresholds {
        config.thresholds = o.apply(config.thresholds);
    }

    let result = tokio::task::spawn_blocking(move || analyze_roi(&image, &roi, &config)).await;
    match result {
        Ok(Ok(report)) => {
            ([(header::CONTENT_TYPE, "application/json")], report.to_json()).into_response()
        }
        Ok(Err(e)) => {
            let status = match &e {
                AnalysisError::Roi(_) | AnalysisError::Thresholds(_) => StatusCode::UNPROCESSABLE_ENTITY,
                AnalysisError::NoCellFound(_) => StatusCode::CONFLICT,
                _ => StatusCode::INTERNAL_SERVER_ERROR,
            };
            error(status, e.kind(), e.to_string())
        }
        Err(join) => error(StatusCode::INTERNAL_SERVER_ERROR, "Internal", join.to_string()),
    }
}
