use std::collections::HashMap;
use std::io::{BufReader, BufWriter};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use super::resp::{read_command, read_reply, write_command, write_reply, Reply};
use super::{deserialize_context, key_for, serialize_context, ContextStore, StoreError, StoreMode};
use crate::context::DialogueContext;

const IO_TIMEOUT: Duration = Duration::from_secs(5);

struct Conn {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl Conn {
    fn open(addr: &str) -> Result<Self, StoreError> {
        let stream = TcpStream::connect(addr).map_err(|e| StoreError::Connection(format!("{addr}: {e}")))?;
        stream.set_read_timeout(Some(IO_TIMEOUT)).ok();
        stream.set_write_timeout(Some(IO_TIMEOUT)).ok();
        stream.set_nodelay(true).ok();
        let reader = BufReader::new(stream.try_clone().map_err(|e| StoreError::Connection(e.to_string()))?);
        Ok(Self {
            reader,
            writer: BufWriter::new(stream),
        })
    }

    fn call(&mut self, parts: &[&[u8]]) -> std::io::Result<Reply> {
        write_command(&mut self.writer, parts)?;
        read_reply(&mut self.reader)
    }
}

/// Client for any server speaking the RESP GET/SET/DEL commands. One connection,
/// commands serialized by a mutex, reconnects once after an I/O error.
pub struct KvStore {
    addr: String,
    conn: Mutex<Option<Conn>>,
    ttl_secs: Option<u64>,
}

impl std::fmt::Debug for KvStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KvStore").field("addr", &self.addr).field("ttl_secs", &self.ttl_secs).finish()
    }
}

impl KvStore {
    /// Connects and pings.
    pub fn connect(addr: &str) -> Result<Self, StoreError> {
        let store = Self {
            addr: addr.to_string(),
            conn: Mutex::new(Some(Conn::open(addr)?)),
            ttl_secs: None,
        };
        match store.command(&[b"PING"])? {
            Reply::Simple(_) | Reply::Bulk(Some(_)) => Ok(store),
            other => Err(StoreError::Protocol(format!("unexpected PING reply {other:?}"))),
        }
    }

    /// Expire saved contexts after `secs` seconds.
    pub fn with_ttl(mut self, secs: Option<u64>) -> Self {
        self.ttl_secs = secs;
        self
    }

    pub fn addr(&self) -> &str {
        &self.addr
    }

    fn command(&self, parts: &[&[u8]]) -> Result<Reply, StoreError> {
        let mut guard = self.conn.lock().expect("kv connection lock");
        for attempt in 0..2 {
            if guard.is_none() {
                *guard = Some(Conn::open(&self.addr)?);
            }
            match guard.as_mut().expect("connected").call(parts) {
                Ok(Reply::Error(e)) => return Err(StoreError::Protocol(e)),
                Ok(r) => return Ok(r),
                Err(e) => {
                    *guard = None;
                    if attempt == 1 {
                        return Err(StoreError::Connection(format!("{}: {e}", self.addr)));
                    }
                }
            }
        }
        unreachable!("loop returns")
    }
}

impl ContextStore for KvStore {
    fn mode(&self) -> StoreMode {
        StoreMode::Distributed
    }

    fn load(&self, session_id: &str) -> Result<DialogueContext, StoreError> {
        let key = key_for(session_id);
        match self.command(&[b"GET", key.as_bytes()])? {
            Reply::Bulk(Some(bytes)) => deserialize_context(&bytes),
            Reply::Bulk(None) => Err(StoreError::NotFound(session_id.to_string())),
            other => Err(StoreError::Protocol(format!("unexpected GET reply {other:?}"))),
        }
    }

    fn save(&self, ctx: &DialogueContext) -> Result<(), StoreError> {
        let key = key_for(&ctx.session_id);
        let value = serialize_context(ctx);
        let ttl = self.ttl_secs.map(|t| t.to_string());
        let reply = match &ttl {
            Some(t) => self.command(&[b"SET", key.as_bytes(), &value, b"EX", t.as_bytes()])?,
            None => self.command(&[b"SET", key.as_bytes(), &value])?,
        };
        match reply {
            Reply::Simple(_) => Ok(()),
            other => Err(StoreError::Protocol(format!("unexpected SET reply {other:?}"))),
        }
    }

    fn delete(&self, session_id: &str) -> Result<(), StoreError> {
        let key = key_for(session_id);
        match self.command(&[b"DEL", key.as_bytes()])? {
            Reply::Integer(_) => Ok(()),
            other => Err(StoreError::Protocol(format!("unexpected DEL reply {other:?}"))),
        }
    }
}

type Table = Arc<Mutex<HashMap<Vec<u8>, (Vec<u8>, Option<Instant>)>>>;

/// A small in-memory RESP server (PING, GET, SET [EX], DEL, EXISTS, DBSIZE, FLUSHALL).
/// Enough to run the distributed mode without an external installation.
pub struct KvServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
    table: Table,
}

impl KvServer {
    /// Binds (use port 0 for an ephemeral port) and serves on background threads.
    pub fn start(bind: &str) -> std::io::Result<Self> {
        let listener = TcpListener::bind(bind)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let table: Table = Arc::default();
        let accept = {
            let stop = stop.clone();
            let table = table.clone();
            thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let table = table.clone();
                    let stop = stop.clone();
                    thread::spawn(move || serve_connection(stream, table, stop));
                }
            })
        };
        Ok(Self {
            addr,
            stop,
            accept: Some(accept),
            table,
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn len(&self) -> usize {
        self.table.lock().expect("kv table").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Blocks the calling thread until the process exits.
    pub fn wait(mut self) {
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_accepting();
    }

    fn stop_accepting(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

impl Drop for KvServer {
    fn drop(&mut self) {
        if self.accept.is_some() {
            self.stop_accepting();
        }
    }
}

fn serve_connection(stream: TcpStream, table: Table, stop: Arc<AtomicBool>) {
    stream.set_read_timeout(Some(Duration::from_millis(200))).ok();
    let Ok(read_half) = stream.try_clone() else { return };
    let mut reader = BufReader::new(read_half);
    let mut writer = BufWriter::new(stream);
    loop {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let cmd = match read_command(&mut reader) {
            Ok(c) => c,
            Err(e) if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => continue,
            Err(_) => break,
        };
        let reply = execute(&cmd, &table);
        if write_reply(&mut writer, &reply).and_then(|_| std::io::Write::flush(&mut writer)).is_err() {
            break;
        }
    }
    let _ = writer.get_ref().shutdown(Shutdown::Both);
}

fn execute(cmd: &[Vec<u8>], table: &Table) -> Reply {
    let name = cmd.first().map(|c| String::from_utf8_lossy(c).to_ascii_uppercase()).unwrap_or_default();
    let mut t = table.lock().expect("kv table");
    let now = Instant::now();
    t.retain(|_, (_, exp)| exp.is_none_or(|e| e > now));
    match (name.as_str(), cmd.len()) {
        ("PING", 1) => Reply::Simple("PONG".into()),
        ("PING", 2) => Reply::Bulk(Some(cmd[1].clone())),
        ("GET", 2) => Reply::Bulk(t.get(&cmd[1]).map(|(v, _)| v.clone())),
        ("SET", 3) => {
            t.insert(cmd[1].clone(), (cmd[2].clone(), None));
            Reply::Simple("OK".into())
        }
        ("SET", 5) if cmd[3].eq_ignore_ascii_case(b"EX") => {
            match String::from_utf8_lossy(&cmd[4]).parse::<u64>() {
                Ok(secs) => {
                    t.insert(cmd[1].clone(), (cmd[2].clone(), Some(now + Duration::from_secs(secs))));
                    Reply::Simple("OK".into())
                }
                Err(_) => Reply::Error("ERR value is not an integer or out of range".into()),
            }
        }
        ("DEL", n) if n >= 2 => Reply::Integer(cmd[1..].iter().filter(|k| t.remove(*k).is_some()).count() as i64),
        ("EXISTS", n) if n >= 2 => Reply::Integer(cmd[1..].iter().filter(|k| t.contains_key(*k)).count() as i64),
        ("DBSIZE", 1) => Reply::Integer(t.len() as i64),
        ("FLUSHALL", 1) => {
            t.clear();
            Reply::Simple("OK".into())
        }
        ("", _) => Reply::Error("ERR empty command".into()),
        _ => Reply::Error(format!("ERR unknown command or wrong arity for '{}'", name.to_lowercase())),
    }
}
