//! Read-only local HTTP service for the explorer.
//!
//! `GET /api/session` returns the session document, `GET /api/layout?vars=..`
//! instantiates one assignment and evaluates it, anything else under `GET`
//! is a static asset. Served state never changes after loading.

use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use sketchopt_core::annotation::DesignVariable;
use sketchopt_core::objective::{evaluate_objectives, ObjectiveRegistry};
use sketchopt_core::parametrizer::{instantiate, ParametricGraph};

use crate::docs::{sha256_hex, ModelDoc, SessionDoc};
use crate::error::{Error, Result};
use crate::pipeline::{assignment, objective_registry};

const INDEX_HTML: &str = include_str!("../assets/index.html");

pub struct ServeState {
    session_json: Vec<u8>,
    session: SessionDoc,
    graph: ParametricGraph,
    variables: Vec<DesignVariable>,
    registry: ObjectiveRegistry,
    assets: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Reply {
    fn json<T: Serialize>(status: u16, value: &T) -> Self {
        Self { status, content_type: "application/json", body: serde_json::to_vec(value).expect("serializable") }
    }

    fn error(status: u16, message: impl Into<String>) -> Self {
        Self::json(status, &ErrorBody { error: message.into() })
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

#[derive(Serialize)]
pub struct LayoutBody {
    pub vars: Vec<f64>,
    pub feasible: bool,
    /// One polyline per wall axis, in pixels (y down); empty when infeasible.
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub nodes: Vec<[f64; 2]>,
    pub objectives: ObjectivesBody,
}

#[derive(Serialize)]
pub struct ObjectivesBody {
    pub labels: Vec<String>,
    /// `null` when the layout is infeasible.
    pub values: Option<Vec<f64>>,
}

impl ServeState {
    /// Loads the session and the model it was produced from.
    pub fn new(session_bytes: Vec<u8>, model_bytes: &[u8], assets: Option<PathBuf>) -> Result<Self> {
        let session = SessionDoc::parse(&session_bytes)?;
        let model = ModelDoc::parse(model_bytes)?;
        if sha256_hex(model_bytes) != session.provenance.model_sha256 {
            return Err(Error::Config("the session was produced from a different model document".into()));
        }
        let registry = objective_registry(&session.config.objectives, &session.config.builtin_options())?;
        Ok(Self {
            graph: model.to_graph()?,
            variables: model.design_variables()?,
            registry,
            session_json: session_bytes,
            session,
            assets,
        })
    }

    pub fn session(&self) -> &SessionDoc {
        &self.session
    }

    pub fn handle(&self, method: &str, url: &str) -> Reply {
        if method != "GET" && method != "HEAD" {
            return Reply::error(405, "the service is read-only; only GET is supported");
        }
        let parsed = match url::Url::parse("http://localhost").and_then(|b| b.join(url)) {
            Ok(u) => u,
            Err(e) => return Reply::error(400, format!("malformed request target: {e}")),
        };
        match parsed.path() {
            "/api/session" => Reply { status: 200, content_type: "application/json", body: self.session_json.clone() },
            "/api/layout" => {
                let vars = parsed.query_pairs().find(|(k, _)| k == "vars").map(|(_, v)| v.into_owned());
                match vars {
                    Some(v) => self.layout(&v),
                    None => Reply::error(400, "missing query parameter 'vars'"),
                }
            }
            path => self.asset(path),
        }
    }

    fn layout(&self, query: &str) -> Reply {
        let mut genome = Vec::new();
        if !query.is_empty() {
            for tok in query.split(',') {
                match tok.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => genome.push(v),
                    _ => return Reply::error(400, format!("'{tok}' is not a finite number")),
                }
            }
        }
        let assign = match assignment(&self.variables, &genome) {
            Ok(a) => a,
            Err(e) => return Reply::error(400, e.to_string()),
        };
        if let Some(v) = self.variables.iter().zip(&genome).find(|(v, &x)| !v.contains(x)) {
            return Reply::error(400, format!("variable {} value {} outside [{}, {}]", v.0.id, v.1, v.0.lo, v.0.hi));
        }
        let objectives = match evaluate_objectives(&self.graph, &self.variables, &assign, &self.registry) {
            Ok(o) => o,
            Err(e) => return Reply::error(500, e.to_string()),
        };
        let layout = instantiate(&self.graph, &assign, &self.variables).ok();
        let body = LayoutBody {
            vars: genome,
            feasible: layout.is_some(),
            polylines: layout
                .as_ref()
                .map(|l| l.polylines.iter().map(|pl| pl.iter().map(|p| [p.x, p.y]).collect()).collect())
                .unwrap_or_default(),
            nodes: layout.as_ref().map(|l| l.node_positions.iter().map(|p| [p.x, p.y]).collect()).unwrap_or_default(),
            objectives: ObjectivesBody { labels: objectives.labels, values: objectives.values },
        };
        Reply::json(200, &body)
    }

    fn asset(&self, path: &str) -> Reply {
        if path == "/" || path == "/index.html" {
            if let Some(r) = self.asset_file("index.html") {
                return r;
            }
            return Reply { status: 200, content_type: "text/html; charset=utf-8", body: INDEX_HTML.as_bytes().to_vec() };
        }
        let rel = path.trim_start_matches('/');
        self.asset_file(rel).unwrap_or_else(|| Reply::error(404, format!("no such resource '{path}'")))
    }

    fn asset_file(&self, rel: &str) -> Option<Reply> {
        let root = self.assets.as_ref()?;
        let rel = Path::new(rel);
        if !rel.components().all(|c| matches!(c, Component::Normal(_))) {
            return None;
        }
        let body = std::fs::read(root.join(rel)).ok()?;
        Some(Reply { status: 200, content_type: content_type(rel), body })
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        _ => "application/octet-stream",
    }
}

pub fn bind(addr: &str) -> Result<tiny_http::Server> {
    tiny_http::Server::http(addr).map_err(|e| Error::Service(format!("cannot listen on {addr}: {e}")))
}

/// Answers requests on `workers` threads until the server shuts down.
pub fn run(server: &tiny_http::Server, state: &ServeState, workers: usize) {
    std::thread::scope(|s| {
        for _ in 0..workers.max(1) {
            s.spawn(|| {
                for request in server.incoming_requests() {
                    let reply = state.handle(request.method().as_str(), request.url());
                    let header = tiny_http::Header::from_bytes("Content-Type", reply.content_type).expect("valid header");
                    let response =
                        tiny_http::Response::from_data(reply.body).with_status_code(reply.status).with_header(header);
                    let _ = request.respond(response);
                }
            });
        }
    });
}
