use std::io::Write;
use std::sync::Arc;

use dtou_service::{serve, Engine, ServiceConfig};
use dtou_store::{Store, StoreError};

use crate::{read_graph, Exit, Failure, ServeArgs};

pub fn run(args: &ServeArgs, err: &mut dyn Write) -> Result<Exit, Failure> {
    let store = Store::open(&args.store).map_err(|e| match e {
        StoreError::Version(_) => Failure::Structural(format!("{}: {e}", args.store.display())),
        other => Failure::Io(format!("{}: {other}", args.store.display())),
    })?;
    let config = ServiceConfig {
        strict: args.strict,
        reasoner: args.reasoner.options(),
        vocabulary: args.vocabulary.as_deref().map(read_graph).transpose()?,
        ..ServiceConfig::default()
    };
    let engine = Arc::new(Engine::new(Arc::new(store), config));
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.listen).await?;
        writeln!(err, "listening on http://{}", listener.local_addr()?)?;
        serve(listener, engine).await
    })?;
    Ok(Exit::Ok)
}
