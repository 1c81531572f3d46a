//! HTTP front end for interactive sessions: create a session, fetch the
//! current population with geometry, submit selections and download the
//! session log.

mod error;
mod payload;
mod routes;
mod state;

pub use error::ApiError;
pub use payload::{CreateSession, FacePayload, PopulationPayload, SelectionRequest, SelectionResponse, SessionHandle, Topology};
pub use routes::router;
pub use state::{AppState, RigRegistry};

use std::net::SocketAddr;

/// Serves `state` on `addr` until ctrl-c.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
