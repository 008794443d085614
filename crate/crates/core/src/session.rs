//! Session lifecycle on top of an [`Engine`] and a [`ContextStore`]: one in-flight turn
//! per session, later requests queue in arrival order up to a bound.

use std::collections::HashMap;
use std::sync::{Arc, Condvar, Mutex};

use chrono::NaiveDate;
use thiserror::Error;

use crate::context::DialogueContext;
use crate::dialogue::{DialogueError, Engine, TurnOutcome};
use crate::store::{ContextStore, StoreError};
use crate::tree::TreeSnapshot;

/// Requests allowed to wait behind the in-flight turn of one session.
pub const DEFAULT_QUEUE_BOUND: usize = 4;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session `{0}` not found")]
    NotFound(String),
    #[error("session `{0}` has too many queued turns")]
    Busy(String),
    #[error(transparent)]
    Store(StoreError),
    #[error(transparent)]
    Dialogue(#[from] DialogueError),
}

impl From<StoreError> for SessionError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(id) => SessionError::NotFound(id),
            other => SessionError::Store(other),
        }
    }
}

#[derive(Default)]
struct TurnLock {
    tickets: Mutex<(u64, u64)>,
    cv: Condvar,
}

struct TurnGuard<'a>(&'a TurnLock);

impl Drop for TurnGuard<'_> {
    fn drop(&mut self) {
        let mut t = self.0.tickets.lock().expect("turn lock");
        t.1 += 1;
        self.0.cv.notify_all();
    }
}

impl TurnLock {
    /// Ticket lock: (next ticket, now serving). FIFO by construction.
    fn acquire(&self, bound: usize) -> Option<TurnGuard<'_>> {
        let mut t = self.tickets.lock().expect("turn lock");
        let ahead = (t.0 - t.1) as usize;
        if ahead > bound {
            return None;
        }
        let mine = t.0;
        t.0 += 1;
        while t.1 != mine {
            t = self.cv.wait(t).expect("turn lock");
        }
        Some(TurnGuard(self))
    }
}

pub struct SessionManager {
    engine: Arc<Engine>,
    store: Arc<dyn ContextStore>,
    locks: Mutex<HashMap<String, Arc<TurnLock>>>,
    queue_bound: usize,
    clock: Option<NaiveDate>,
}

impl std::fmt::Debug for SessionManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionManager")
            .field("engine", &self.engine)
            .field("store", &self.store.mode())
            .field("queue_bound", &self.queue_bound)
            .finish()
    }
}

impl SessionManager {
    pub fn new(engine: Arc<Engine>, store: Arc<dyn ContextStore>) -> Self {
        Self {
            engine,
            store,
            locks: Mutex::new(HashMap::new()),
            queue_bound: DEFAULT_QUEUE_BOUND,
            clock: None,
        }
    }

    pub fn with_queue_bound(mut self, bound: usize) -> Self {
        self.queue_bound = bound;
        self
    }

    /// Pins "today" for new sessions (tests and replays).
    pub fn with_clock(mut self, today: NaiveDate) -> Self {
        self.clock = Some(today);
        self
    }

    pub fn engine(&self) -> &Arc<Engine> {
        &self.engine
    }

    pub fn store(&self) -> &Arc<dyn ContextStore> {
        &self.store
    }

    fn lock_for(&self, id: &str) -> Arc<TurnLock> {
        self.locks
            .lock()
            .expect("lock table")
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    /// Creates and persists a fresh session. Returns its id and the greeting.
    pub fn create_session(&self) -> Result<(String, String), SessionError> {
        let ctx = match self.clock {
            Some(day) => self.engine.new_context(uuid::Uuid::new_v4().to_string(), day),
            None => self.engine.fresh_context(),
        };
        self.store.create(&ctx)?;
        Ok((ctx.session_id, self.engine.greeting()))
    }

    /// Runs one turn under the session's turn lock and saves the result.
    pub fn message(&self, session_id: &str, text: &str) -> Result<TurnOutcome, SessionError> {
        let lock = self.lock_for(session_id);
        let _guard = lock
            .acquire(self.queue_bound)
            .ok_or_else(|| SessionError::Busy(session_id.to_string()))?;
        let ctx = self.store.load(session_id)?;
        self.engine.check_context(&ctx)?;
        let (outcome, next) = self.engine.process_turn(&ctx, text);
        self.store.save(&next)?;
        Ok(outcome)
    }

    /// Last committed tree; never waits for an in-flight turn.
    pub fn tree(&self, session_id: &str) -> Result<TreeSnapshot, SessionError> {
        Ok(self.store.load(session_id)?.tree.snapshot())
    }

    pub fn context(&self, session_id: &str) -> Result<DialogueContext, SessionError> {
        Ok(self.store.load(session_id)?)
    }

    pub fn delete(&self, session_id: &str) -> Result<(), SessionError> {
        self.store.delete(session_id)?;
        self.locks.lock().expect("lock table").remove(session_id);
        Ok(())
    }
}
