use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use tod_core::backend::BackendRegistry;
use tod_core::config::{compile_bot_config, validate_config, ConfigSources};
use tod_core::store::{make_store, KvServer, StoreError, StoreMode};
use tod_core::tree::task_to_dot;
use tod_core::{BotConfig, ConfigError, Engine, SessionManager};

#[derive(Debug, Parser)]
#[command(name = "tod", version, about = "Task-oriented dialogue engine")]
pub struct Cli {
    /// error, warn, info, debug or trace. RUST_LOG takes precedence.
    #[arg(long, global = true, default_value = "info")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Talk to the bot on stdin/stdout.
    Chat(ChatArgs),
    /// Check a configuration and print the findings.
    Validate(BotArgs),
    /// Print a task's tree as Graphviz DOT.
    Viz {
        #[command(flatten)]
        bot: BotArgs,
        task: String,
    },
    /// Run the bundled key-value server used by `--store kv`.
    KvServe {
        #[arg(long, default_value = "127.0.0.1:6379")]
        bind: String,
    },
}

/// Where the configuration lives. `--bot-dir` supplies `tasks.yaml`, `entities.yaml`,
/// `templates.yaml` and `policy.yaml` (the last two only if present); explicit paths override.
#[derive(Debug, Clone, Args)]
pub struct BotArgs {
    #[arg(long)]
    pub bot_dir: Option<PathBuf>,
    #[arg(long)]
    pub task_config: Option<PathBuf>,
    #[arg(long)]
    pub entity_config: Option<PathBuf>,
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long)]
    pub policy: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub bot: BotArgs,
    #[arg(long, default_value = "memory")]
    pub store: StoreMode,
    #[arg(long)]
    pub kv_addr: Option<String>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Seconds allowed per backend call.
    #[arg(long, default_value_t = 5.0)]
    pub backend_timeout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ChatArgs {
    #[command(flatten)]
    pub bot: BotArgs,
    #[arg(long, default_value_t = 5.0)]
    pub backend_timeout: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Config(ConfigError),
    #[error("configuration has {0} error(s)")]
    Invalid(usize),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { path, source } => CliError::Io(io::Error::new(source.kind(), format!("{path}: {source}"))),
            other => CliError::Config(other),
        }
    }
}

impl CliError {
    /// 1 for a bad configuration, 2 for usage or file errors, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Store(_) | CliError::Runtime(_) => 3,
        }
    }
}

impl BotArgs {
    pub fn sources(&self) -> Result<ConfigSources, CliError> {
        let pick = |explicit: &Option<PathBuf>, file: &str, required: bool| -> Result<Option<PathBuf>, CliError> {
            if let Some(p) = explicit {
                return Ok(Some(p.clone()));
            }
            match &self.bot_dir {
                Some(dir) => {
                    let p = dir.join(file);
                    Ok((required || p.exists()).then_some(p))
                }
                None if required => Err(CliError::Usage(format!(
                    "missing --{} (or --bot-dir)",
                    if file == "tasks.yaml" { "task-config" } else { "entity-config" }
                ))),
                None => Ok(None),
            }
        };
        let task = pick(&self.task_config, "tasks.yaml", true)?.expect("required");
        let entity = pick(&self.entity_config, "entities.yaml", true)?.expect("required");
        let templates = pick(&self.templates, "templates.yaml", false)?;
        let policy = pick(&self.policy, "policy.yaml", false)?;

        let mut sources = ConfigSources::new(read(&task)?, read(&entity)?, String::new());
        sources.task_name = task.display().to_string();
        sources.entity_name = entity.display().to_string();
        if let Some(t) = templates {
            sources.templates = read(&t)?;
            sources.templates_name = t.display().to_string();
        }
        if let Some(p) = policy {
            sources.policy = Some(read(&p)?);
            sources.policy_name = p.display().to_string();
        }
        Ok(sources)
    }

    pub fn load(&self) -> Result<BotConfig, CliError> {
        let config = BotConfig::from_sources(&self.sources()?)?;
        for w in &config.warnings {
            log::warn!("{w}");
        }
        Ok(config)
    }
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
}

fn timeout(secs: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(secs)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| CliError::Usage(format!("invalid --backend-timeout {secs}")))
}

pub fn build_engine(config: BotConfig, backend_timeout: Duration) -> Engine {
    let mut backends = BackendRegistry::with_demo_handlers();
    backends.set_timeout(backend_timeout);
    Engine::new(Arc::new(config), Arc::new(backends))
}

/// A closed stdout (e.g. piped into `head`) is not a failure.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match dispatch(cli) {
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve(args) => serve(args),
        Command::Chat(args) => chat(args, io::stdin().lock(), io::stdout().lock()),
        Command::Validate(bot) => validate(&bot, &mut io::stdout().lock()),
        Command::Viz { bot, task } => {
            let config = bot.load()?;
            let dot = task_to_dot(&config, &task).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(io::stdout(), "{dot}")?;
            Ok(())
        }
        Command::KvServe { bind } => {
            let server = KvServer::start(&bind)?;
            println!("kv listening on {}", server.addr());
            server.wait();
            Ok(())
        }
    }
}

/// Compiles without failing fast so every finding is printed.
pub fn validate(bot: &BotArgs, out: &mut impl Write) -> Result<(), CliError> {
    let config = compile_bot_config(&bot.sources()?)?;
    let report = validate_config(&config);
    writeln!(out, "{report}")?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Invalid(report.errors.len()))
    }
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let engine = build_engine(args.bot.load()?, timeout(args.backend_timeout)?);
    let store = make_store(args.store, args.kv_addr.as_deref())?;
    let manager = Arc::new(SessionManager::new(Arc::new(engine), store));
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|e| CliError::Usage(format!("bad address: {e}")))?;

    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::Runtime(format!("cannot bind {addr}: {e}")))?;
        println!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, crate::http::router(manager))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Runtime(e.to_string()))
    })
}

/// Line-oriented chat. `/tree` dumps the task tree, `/quit` or end of input stops.
pub fn chat(args: ChatArgs, input: impl BufRead, mut out: impl Write) -> Result<(), CliError> {
    let engine = build_engine(args.bot.load()?, timeout(args.backend_timeout)?);
    let manager = SessionManager::new(Arc::new(engine), make_store(StoreMode::Standalone, None)?);
    let fail = |e: tod_core::SessionError| CliError::Runtime(e.to_string());
    let (id, greeting) = manager.create_session().map_err(fail)?;
    writeln!(out, "bot: {greeting}")?;
    for line in input.lines() {
        let line = line?;
        match line.trim() {
            "/quit" => break,
            "/tree" => {
                let snap = manager.tree(&id).map_err(fail)?;
                let json = serde_json::to_string_pretty(&snap).map_err(|e| CliError::Runtime(e.to_string()))?;
                writeln!(out, "{json}")?;
            }
            text => {
                let turn = manager.message(&id, text).map_err(fail)?;
                writeln!(out, "bot: {}", turn.reply)?;
            }
        }
        out.flush()?;
    }
    Ok(())
}
