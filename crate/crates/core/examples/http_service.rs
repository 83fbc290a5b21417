//! Drives the HTTP service in process: upload an image, then analyze two
//! ROIs against the same session. Pass `--listen` to serve on
//! 127.0.0.1:8080 instead.

use axum::body::Body;
use axum::http::{header, Request};
use erythro::raster::encode_png;
use erythro::service::{self, ServiceConfig, UploadResponse};
use erythro::synth::render_scene;
use erythro::ShapeSpec;
use http_body_util::BodyExt;
use tower::ServiceExt;

async fn call(app: &axum::Router, req: Request<Body>) -> (u16, String) {
    let resp = app.clone().oneshot(req).await.expect("router is infallible");
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.expect("body").to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    if std::env::args().any(|a| a == "--listen") {
        println!("listening on 127.0.0.1:8080");
        return Ok(service::serve("127.0.0.1:8080", ServiceConfig::default()).await?);
    }

    let app = service::router(ServiceConfig::default());
    let scene = render_scene(
        &[ShapeSpec::annulus(34.0, 20.0).at(50.0, 50.0), ShapeSpec::crescent(30.0, 26.0, 12.0).at(150.0, 50.0)],
        200,
        100,
        erythro::synth::DEFAULT_BACKGROUND,
    )?;
    let upload = Request::post("/api/v1/images")
        .header(header::CONTENT_TYPE, "image/png")
        .body(Body::from(encode_png(&scene)?))?;
    let (status, body) = call(&app, upload).await;
    println!("POST /api/v1/images -> {status} {body}");
    let session: UploadResponse = serde_json::from_str(&body)?;

    for roi in [r#"{"x":5,"y":5,"w":90,"h":90}"#, r#"{"x":110,"y":10,"w":80,"h":80}"#, r#"{"x":0,"y":0,"w":0,"h":5}"#] {
        let req = Request::post(format!("/api/v1/images/{}/analyze", session.session))
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(format!(r#"{{"roi":{roi}}}"#)))?;
        let (status, body) = call(&app, req).await;
        let summary = match serde_json::from_str::<serde_json::Value>(&body)? {
            v if status == 200 => format!("label {} ncc {}", v["label"], v["morpho"]["ncc"]),
            v => format!("{} {}", v["kind"], v["error"]),
        };
        println!("analyze {roi} -> {status} {summary}");
    }
    Ok(())
}
