use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use emogen_core::evolution::{Advance, Selection, Session, SessionState};
use emogen_core::io::log_to_string;
use emogen_core::Error;
use serde::de::DeserializeOwned;
use tower_http::cors::CorsLayer;

use crate::error::ApiError;
use crate::payload::{
    CreateSession, FacePayload, PopulationPayload, SelectionRequest, SelectionResponse, SessionHandle, Topology,
};
use crate::state::{AppState, Entry};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/rigs", get(list_rigs))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/population", get(get_population))
        .route("/sessions/{id}/selection", post(post_selection))
        .route("/sessions/{id}/log", get(get_log))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

fn entry(state: &AppState, id: &str) -> Result<Arc<Mutex<Entry>>, ApiError> {
    state
        .sessions
        .read()
        .expect("session table lock")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown session '{id}'")))
}

fn handle(id: &str, entry: &Entry) -> SessionHandle {
    SessionHandle {
        id: id.to_string(),
        rig: entry.rig.clone(),
        state: entry.session.state(),
        generation: entry.session.generation(),
        config: entry.session.config().clone(),
    }
}

fn population(id: &str, session: &Session) -> Result<PopulationPayload, ApiError> {
    let rig = session.engine().rig();
    let cfg = session.config();
    let faces = session
        .population()
        .members
        .iter()
        .enumerate()
        .map(|(index, m)| {
            Ok(FacePayload {
                index,
                weights: m.weights.clone(),
                vertices: rig
                    .evaluate_vertices(&m.weights)
                    .map_err(|e| ApiError::internal(e.to_string()))?,
                topology: rig.id().to_string(),
                provenance: m.provenance.clone(),
                corrected: m.correction.corrected(),
                unresolved: m.correction.unresolved,
            })
        })
        .collect::<Result<_, ApiError>>()?;
    Ok(PopulationPayload {
        session: id.to_string(),
        generation: session.generation(),
        max_generations: cfg.max_generations,
        min_selections: cfg.min_selections,
        max_selections: cfg.max_selections,
        topology: Topology {
            id: rig.id().to_string(),
            faces: rig.neutral().faces.clone(),
        },
        faces,
    })
}

fn flush(state: &AppState, id: &str, session: &Session) {
    let Some(dir) = &state.log_dir else { return };
    let path = dir.join(format!("{id}.jsonl"));
    if let Err(e) = emogen_core::io::write_log(&path, session.log()) {
        log::warn!("could not write {}: {e}", path.display());
    }
}

async fn list_rigs(State(state): State<AppState>) -> Json<Vec<String>> {
    Json(state.rigs.ids())
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: CreateSession = if body.is_empty() { CreateSession::default() } else { parse(&body)? };
    let rig = state
        .rigs
        .get(request.rig.as_deref())
        .ok_or_else(|| ApiError::not_found(format!("unknown rig '{}'", request.rig.as_deref().unwrap_or("default"))))?
        .clone();
    let session = Session::new(rig.clone(), request.config, request.fixed_sets)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let id = format!("{:032x}", rand::random::<u128>());
    let entry = Entry {
        rig: rig.id().to_string(),
        session,
    };
    let body = handle(&id, &entry);
    flush(&state, &id, &entry.session);
    state
        .sessions
        .write()
        .expect("session table lock")
        .insert(id, Arc::new(Mutex::new(entry)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionHandle>, ApiError> {
    let entry = entry(&state, &id)?;
    let guard = entry.lock().expect("session lock");
    Ok(Json(handle(&id, &guard)))
}

async fn get_population(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<PopulationPayload>, ApiError> {
    let entry = entry(&state, &id)?;
    let guard = entry.lock().expect("session lock");
    if guard.session.state() != SessionState::AwaitingSelection {
        return Err(ApiError::conflict(format!("session is {:?}", guard.session.state())));
    }
    Ok(Json(population(&id, &guard.session)?))
}

async fn post_selection(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SelectionResponse>, ApiError> {
    let entry = entry(&state, &id)?;
    let request: SelectionRequest = parse(&body)?;
    let mut guard = entry.lock().expect("session lock");
    let session = &mut guard.session;
    if session.state() != SessionState::AwaitingSelection {
        return Err(ApiError::conflict(format!("session is {:?}", session.state())));
    }
    if request.generation != session.generation() {
        return Err(ApiError::conflict(format!(
            "selection is for generation {} but the session is at generation {}",
            request.generation,
            session.generation()
        )));
    }
    let cfg = session.config();
    let selection = Selection::new(request.elite, request.others);
    selection
        .validate(session.population().len(), cfg.min_selections, cfg.max_selections)
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let log = format!("/sessions/{id}/log");
    let response = match session.submit(selection) {
        Ok(Advance::Finished(elite)) => SelectionResponse {
            is_final: true,
            generation: request.generation,
            population: None,
            elite: Some(elite.clone()),
            log,
        },
        Ok(Advance::Next(_)) => SelectionResponse {
            is_final: false,
            generation: session.generation(),
            population: Some(population(&id, session)?),
            elite: None,
            log,
        },
        Err(Error::InvalidInput(m)) => return Err(ApiError::unprocessable(m)),
        Err(e) => return Err(ApiError::internal(e.to_string())),
    };
    flush(&state, &id, session);
    Ok(Json(response))
}

async fn get_log(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = entry(&state, &id)?;
    let guard = entry.lock().expect("session lock");
    let text = log_to_string(guard.session.log()).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}
