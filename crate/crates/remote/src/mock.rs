use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use texrestore::geometry::Mesh;
use texrestore::image::{Image, Mask};
use texrestore::imagesource::{blend_keep_update, OracleSource};
use texrestore::texopt::Texture;
use texrestore::Real;
use tokio::sync::oneshot;

use crate::protocol::{decode_b64, encode_b64, ErrorBody, GenerateRequest, GenerateResponse, GENERATE_PATH};

/// Answers generation requests with renders of a ground-truth textured mesh,
/// blended with the request's init image under its update mask.
pub struct MockGenerator<S> {
    oracle: OracleSource<S>,
}

impl<S: Real> MockGenerator<S> {
    pub fn new(mesh: Mesh<S>, texture: Texture<S>) -> texrestore::Result<Self> {
        Ok(Self {
            oracle: OracleSource::new(mesh, texture)?,
        })
    }

    /// Handles one decoded request. `Err((status, message))` on failure.
    pub fn respond(&self, req: &GenerateRequest) -> Result<GenerateResponse, (StatusCode, String)> {
        let bad = |m: String| (StatusCode::BAD_REQUEST, m);
        if req.views.is_empty() || req.views.len() > 2 {
            return Err(bad(format!("expected 1 or 2 views, got {}", req.views.len())));
        }
        if req.denoise_steps == 0 {
            return Err(bad("denoise_steps must be at least 1".into()));
        }
        let mut images = Vec::with_capacity(req.views.len());
        for v in &req.views {
            let cam = v.camera.to_camera::<S>(&v.descriptor);
            if !cam.is_valid() {
                return Err(bad(format!("invalid camera for view {:?}", v.descriptor)));
            }
            let rendered = self
                .oracle
                .render(&cam)
                .map_err(|e| (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
            let decode = |field: &str, b64: &str| {
                decode_b64(b64).map_err(|e| bad(format!("view {:?} {field}: {e}", v.descriptor)))
            };
            let out = if v.mask_png_b64.is_empty() {
                rendered
            } else {
                let mask = Mask::from_png(&decode("mask", &v.mask_png_b64)?).map_err(|e| bad(e.to_string()))?;
                let init = Image::<S>::from_png(&decode("init", &v.init_png_b64)?).map_err(|e| bad(e.to_string()))?;
                blend_keep_update(&rendered, &init, &mask).map_err(|e| bad(e.to_string()))?
            };
            let png = out
                .to_png()
                .map_err(|e| (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
            images.push(encode_b64(&png));
        }
        Ok(GenerateResponse { images_png_b64: images })
    }
}

fn error_response(status: StatusCode, message: String) -> Response {
    let body = serde_json::to_string(&ErrorBody { error: message }).expect("error body serializes");
    (status, [("content-type", "application/json")], body).into_response()
}

async fn generate<S: Real>(State(generator): State<Arc<MockGenerator<S>>>, body: Bytes) -> Response {
    let req: GenerateRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    match generator.respond(&req) {
        Ok(resp) => {
            let body = serde_json::to_string(&resp).expect("response serializes");
            (StatusCode::OK, [("content-type", "application/json")], body).into_response()
        }
        Err((status, message)) => error_response(status, message),
    }
}

fn router<S: Real>(generator: MockGenerator<S>) -> Router {
    Router::new()
        .route(GENERATE_PATH, post(generate::<S>))
        .layer(DefaultBodyLimit::disable())
        .with_state(Arc::new(generator))
}

fn runtime() -> std::io::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_current_thread().enable_all().build()
}

/// Serves the mock on `addr` until the process ends. Requests are handled one at a time.
pub fn serve_mock<S: Real>(generator: MockGenerator<S>, addr: SocketAddr) -> std::io::Result<()> {
    runtime()?.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        axum::serve(listener, router(generator)).await
    })
}

/// A mock server on a background thread; stopped when dropped.
pub struct MockServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl MockServer {
    /// Binds `addr` (port 0 picks a free port) and starts serving.
    pub fn spawn<S: Real>(generator: MockGenerator<S>, addr: SocketAddr) -> std::io::Result<Self> {
        let listener = std::net::TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            runtime()?.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                axum::serve(listener, router(generator))
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
            })
        });
        Ok(Self {
            addr,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
