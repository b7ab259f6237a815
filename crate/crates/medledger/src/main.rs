//! Command-line client for the medledger node: identity registration,
//! policy/record/access operations, chain verification and the benchmark
//! harness. Exit code is 0 exactly when the contract reports Ok.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use medledger::abac::{ObjectAttrs, PolicyDraft, SubjectAttrs, SubjectRole};
use medledger::bench::{self, BenchOp, LoadProfile};
use medledger::contracts::ContractResult;
use medledger::membership::Role;
use medledger::node::{NetworkConfig, Node, NodeError};
use medledger::ordering::{Backend, OrderingConfig};

#[derive(Parser)]
#[command(
    name = "medledger",
    version,
    about = "Permissioned medical-record ledger with attribute-based access control"
)]
struct Cli {
    /// Data directory (falls back to $MEDLEDGER_DATA_DIR, then ./medledger-data)
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,

    /// Acting identity for signed operations
    #[arg(long, global = true)]
    identity: Option<String>,

    /// Output format for tabular results
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Initialize (or resume) a network in the data directory
    Init {
        /// Ordering backend: kafka_style or pow
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        max_txs_per_block: Option<usize>,
        #[arg(long)]
        batch_timeout_ms: Option<u64>,
        #[arg(long)]
        pow_difficulty_bits: Option<u32>,
        #[arg(long)]
        node_count: Option<usize>,
        #[arg(long)]
        peer_count: Option<usize>,
        /// Bootstrap administrator user id
        #[arg(long, default_value = "admin")]
        admin: String,
    },
    /// Identity operations
    Id {
        #[command(subcommand)]
        cmd: IdCmd,
    },
    /// Access-control policy operations (admin identity required to mutate)
    Policy {
        #[command(subcommand)]
        cmd: PolicyCmd,
    },
    /// Medical record operations
    Record {
        #[command(subcommand)]
        cmd: RecordCmd,
    },
    /// Access checks
    Access {
        #[command(subcommand)]
        cmd: AccessCmd,
    },
    /// Ledger inspection
    Ledger {
        #[command(subcommand)]
        cmd: LedgerCmd,
    },
    /// Benchmarks
    Bench {
        #[command(subcommand)]
        cmd: BenchCmd,
    },
}

#[derive(Subcommand)]
enum IdCmd {
    /// Register a new identity: user id, role (admin|doctor|patient), department
    Register {
        user: String,
        role: String,
        department: String,
    },
}

#[derive(Subcommand)]
enum PolicyCmd {
    /// Add a policy: subject (user role dept), object (record), allow bit, window
    Add {
        user: String,
        role: String,
        department: String,
        record_id: String,
        /// 1 = allow, 0 = deny
        allow: u8,
        create_time: u64,
        end_time: u64,
    },
    /// Update permission/environment of an existing policy (same attrs order)
    Update {
        user: String,
        role: String,
        department: String,
        record_id: String,
        allow: u8,
        create_time: u64,
        end_time: u64,
    },
    /// Delete the policy for a subject/object pair
    Delete {
        user: String,
        role: String,
        department: String,
        record_id: String,
    },
    /// Query the policy for a subject/object pair
    Query {
        user: String,
        role: String,
        department: String,
        record_id: String,
    },
}

#[derive(Subcommand)]
enum RecordCmd {
    /// Store a record file off chain and commit its address
    Add { record_id: String, file: PathBuf },
    /// Replace a record's content
    Update { record_id: String, file: PathBuf },
    /// Delete a record and its blob
    Delete { record_id: String },
    /// Fetch a record's full content
    Query {
        record_id: String,
        /// Write content here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AccessCmd {
    /// Evaluate an access request as (user, role, department) on a record
    Check {
        user: String,
        role: String,
        department: String,
        record_id: String,
        /// Write the granted record content here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LedgerCmd {
    /// Verify hash links, block hashes and transaction signatures from disk
    Verify,
    /// Show every committed write to a world-state key
    History { key: String },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Concurrent-client load sweep against a throwaway node
    Load {
        /// Operations to sweep (comma separated), e.g. PSC.Add,RSC.Query
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
        /// Virtual client counts, ascending
        #[arg(long, value_delimiter = ',', default_values_t = vec![200usize, 400, 600, 800, 1000])]
        clients: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        ops_per_client: usize,
        #[arg(long, default_value_t = 1024)]
        payload_bytes: usize,
        /// Sweeps pooled into each cell measurement
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Reuse this directory for the throwaway node (kept afterwards)
        #[arg(long)]
        work_dir: Option<PathBuf>,
    },
    /// Kafka-style vs proof-of-work commit time across 10..100 nodes
    Consensus {
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long)]
        pow_difficulty_bits: Option<u32>,
        #[arg(long, default_value_t = 10)]
        max_txs_per_block: usize,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Gnuplot-friendly means file
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn data_dir(cli: &Cli) -> PathBuf {
    cli.data_dir
        .clone()
        .or_else(|| std::env::var_os("MEDLEDGER_DATA_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("medledger-data"))
}

fn identity(cli: &Cli) -> Result<String, NodeError> {
    cli.identity
        .clone()
        .ok_or_else(|| NodeError::BadRequest("--identity is required for this command".into()))
}

fn subject_role(s: &str) -> Result<SubjectRole, NodeError> {
    SubjectRole::from_str(s).map_err(NodeError::BadRequest)
}

fn open_node(cli: &Cli) -> Result<Node, NodeError> {
    Node::open(&data_dir(cli))
}

/// Print a contract result; Ok -> exit 0, Error -> error name on stderr, 1.
fn finish(result: ContractResult, payload_to: Option<&PathBuf>) -> Result<ExitCode, NodeError> {
    if result.is_ok() {
        if let Some(bytes) = &result.payload {
            match payload_to {
                Some(path) => {
                    std::fs::write(path, bytes).map_err(|e| NodeError::Internal(e.to_string()))?;
                    println!("{}", result.message);
                }
                None => {
                    // payload goes to stdout untouched; message to stderr so
                    // piping the bytes stays clean
                    eprintln!("{}", result.message);
                    std::io::stdout()
                        .write_all(bytes)
                        .map_err(|e| NodeError::Internal(e.to_string()))?;
                }
            }
        } else {
            println!("{}", result.message);
        }
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{}", result.message);
        Ok(ExitCode::FAILURE)
    }
}

fn run(cli: Cli) -> Result<ExitCode, NodeError> {
    match &cli.command {
        Command::Init {
            backend,
            max_txs_per_block,
            batch_timeout_ms,
            pow_difficulty_bits,
            node_count,
            peer_count,
            admin,
        } => {
            let mut ordering = OrderingConfig::default();
            if let Some(b) = backend {
                ordering.backend =
                    Backend::from_str(b).map_err(NodeError::ConfigError)?;
            }
            if let Some(v) = max_txs_per_block {
                ordering.max_txs_per_block = *v;
            }
            if let Some(v) = batch_timeout_ms {
                ordering.batch_timeout = Duration::from_millis(*v);
            }
            if let Some(v) = pow_difficulty_bits {
                ordering.pow_difficulty_bits = *v;
            }
            if let Some(v) = node_count {
                ordering.node_count = *v;
            }
            let config = NetworkConfig {
                peer_count: peer_count.unwrap_or(4),
                ordering,
                bootstrap_admin: admin.clone(),
                ..NetworkConfig::default()
            };
            let node = Node::bootstrap(&data_dir(&cli), config)?;
            println!(
                "ledger ready at height {} in {}",
                node.ledger_height().unwrap_or(0),
                data_dir(&cli).display()
            );
            node.shutdown();
            Ok(ExitCode::SUCCESS)
        }

        Command::Id { cmd } => {
            let IdCmd::Register {
                user,
                role,
                department,
            } = cmd;
            let role = Role::from_str(role).map_err(NodeError::BadRequest)?;
            let node = open_node(&cli)?;
            let id = node.register_identity(user, role, department)?;
            println!(
                "registered {} ({}, {}) key {}",
                id.user_id,
                id.role,
                id.department,
                bs58::encode(id.public_key).into_string()
            );
            node.shutdown();
            Ok(ExitCode::SUCCESS)
        }

        Command::Policy { cmd } => {
            let node = open_node(&cli)?;
            let result = match cmd {
                PolicyCmd::Add {
                    user,
                    role,
                    department,
                    record_id,
                    allow,
                    create_time,
                    end_time,
                }
                | PolicyCmd::Update {
                    user,
                    role,
                    department,
                    record_id,
                    allow,
                    create_time,
                    end_time,
                } => {
                    let draft = PolicyDraft::new(
                        SubjectAttrs::new(user, subject_role(role)?, department),
                        ObjectAttrs::new(record_id),
                        *allow == 1,
                        *create_time,
                        *end_time,
                    );
                    let signer = identity(&cli)?;
                    if matches!(cmd, PolicyCmd::Add { .. }) {
                        node.add_policy(&signer, &draft)?
                    } else {
                        node.update_policy(&signer, &draft)?
                    }
                }
                PolicyCmd::Delete {
                    user,
                    role,
                    department,
                    record_id,
                } => {
                    let signer = identity(&cli)?;
                    node.delete_policy(
                        &signer,
                        &SubjectAttrs::new(user, subject_role(role)?, department),
                        &ObjectAttrs::new(record_id),
                    )?
                }
                PolicyCmd::Query {
                    user,
                    role,
                    department,
                    record_id,
                } => node.query_policy(
                    &SubjectAttrs::new(user, subject_role(role)?, department),
                    &ObjectAttrs::new(record_id),
                )?,
            };
            let code = finish(result, None)?;
            node.shutdown();
            Ok(code)
        }

        Command::Record { cmd } => {
            let node = open_node(&cli)?;
            let (result, out) = match cmd {
                RecordCmd::Add { record_id, file } => {
                    let content =
                        std::fs::read(file).map_err(|e| NodeError::BadRequest(e.to_string()))?;
                    (node.add_record(&identity(&cli)?, record_id, &content)?, None)
                }
                RecordCmd::Update { record_id, file } => {
                    let content =
                        std::fs::read(file).map_err(|e| NodeError::BadRequest(e.to_string()))?;
                    (node.update_record(&identity(&cli)?, record_id, &content)?, None)
                }
                RecordCmd::Delete { record_id } => {
                    (node.delete_record(&identity(&cli)?, record_id)?, None)
                }
                RecordCmd::Query { record_id, out } => (node.query_record(record_id)?, out.as_ref()),
            };
            let code = finish(result, out)?;
            node.shutdown();
            Ok(code)
        }

        Command::Access { cmd } => {
            let AccessCmd::Check {
                user,
                role,
                department,
                record_id,
                out,
            } = cmd;
            let node = open_node(&cli)?;
            let result = node.check_access(user, subject_role(role)?, department, record_id)?;
            let code = finish(result, out.as_ref())?;
            node.shutdown();
            Ok(code)
        }

        Command::Ledger { cmd } => match cmd {
            LedgerCmd::Verify => {
                let node = open_node(&cli)?;
                let ok = node.verify_chain();
                node.shutdown();
                if ok {
                    println!("chain OK");
                    Ok(ExitCode::SUCCESS)
                } else {
                    eprintln!("InvalidChain: verification failed");
                    Ok(ExitCode::FAILURE)
                }
            }
            LedgerCmd::History { key } => {
                let node = open_node(&cli)?;
                let entries = node.history(key);
                if cli.output == Output::Csv {
                    println!("version,tx_id,kind,bytes");
                    for e in &entries {
                        let (kind, bytes) = match &e.value {
                            Some(v) => ("put", v.len()),
                            None => ("delete", 0),
                        };
                        println!("{},{},{},{}", e.version, hex::encode(e.tx_id), kind, bytes);
                    }
                } else {
                    for e in &entries {
                        match &e.value {
                            Some(v) => println!(
                                "{}  tx {}  put {} bytes",
                                e.version,
                                hex::encode(e.tx_id),
                                v.len()
                            ),
                            None => println!("{}  tx {}  delete", e.version, hex::encode(e.tx_id)),
                        }
                    }
                }
                node.shutdown();
                Ok(ExitCode::SUCCESS)
            }
        },

        Command::Bench { cmd } => run_bench(&cli, cmd),
    }
}

fn run_bench(_cli: &Cli, cmd: &BenchCmd) -> Result<ExitCode, NodeError> {
    match cmd {
        BenchCmd::Load {
            ops,
            clients,
            ops_per_client,
            payload_bytes,
            samples,
            csv,
            work_dir,
        } => {
            let ops: Vec<BenchOp> = if ops.is_empty() {
                BenchOp::ALL.to_vec()
            } else {
                ops.iter()
                    .map(|s| BenchOp::from_str(s).map_err(NodeError::BadRequest))
                    .collect::<Result<_, _>>()?
            };
            // always a throwaway directory: a load run never touches a
            // production ledger
            let tmp;
            let dir = match work_dir {
                Some(d) => d.clone(),
                None => {
                    tmp = tempfile::tempdir().map_err(|e| NodeError::Internal(e.to_string()))?;
                    tmp.path().to_path_buf()
                }
            };
            let node = Arc::new(Node::bootstrap(&dir, NetworkConfig::default())?);
            let mut cells = Vec::new();
            for op in ops {
                let profile = LoadProfile {
                    client_counts: clients.clone(),
                    op,
                    ops_per_client: *ops_per_client,
                    payload_bytes: *payload_bytes,
                    samples: *samples,
                };
                eprintln!("bench load: {op} across {clients:?} clients");
                cells.extend(bench::run_load(&node, &profile)?);
            }
            match csv {
                Some(path) => bench::write_load_csv(path, &cells)
                    .map_err(|e| NodeError::Internal(e.to_string()))?,
                None => {
                    print!("op,clients,total_ms,ok_count,err_count,tps\n");
                    for c in &cells {
                        println!(
                            "{},{},{:.3},{},{},{:.3}",
                            c.op, c.clients, c.total_ms, c.ok_count, c.err_count, c.tps
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        BenchCmd::Consensus {
            rounds,
            pow_difficulty_bits,
            max_txs_per_block,
            csv,
            gnuplot,
        } => {
            let mut base = OrderingConfig {
                max_txs_per_block: *max_txs_per_block,
                ..OrderingConfig::default()
            };
            if let Some(bits) = pow_difficulty_bits {
                base.pow_difficulty_bits = *bits;
            }
            base.validate()?;
            let samples = bench::run_consensus_compare(&base, *rounds);
            if let Some(path) = gnuplot {
                bench::write_consensus_gnuplot(path, &samples)
                    .map_err(|e| NodeError::Internal(e.to_string()))?;
            }
            match csv {
                Some(path) => bench::write_consensus_csv(path, &samples)
                    .map_err(|e| NodeError::Internal(e.to_string()))?,
                None => {
                    println!("backend,node_count,round,millis");
                    for s in &samples {
                        println!("{},{},{},{:.3}", s.backend, s.node_count, s.round, s.millis);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
