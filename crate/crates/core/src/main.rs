use std::process::ExitCode;

use clap::Parser;
use sscap::cli::{self, Cli, FindingKind, Subcommand, MANIFEST_FILE};

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Subcommand::Rerun { manifest } = &args.command {
        return match cli::rerun(manifest, args.global.out.clone()) {
            Ok(r) if r.identical() => {
                println!("{} outputs reproduced in {}", r.record.outputs.len(), r.record.config.out.display());
                exit(0)
            }
            Ok(r) => {
                eprintln!("outputs differ from the manifest: {}", r.mismatches.join(", "));
                exit(1)
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(e.exit_code())
            }
        };
    }
    let dry_run = args.global.dry_run;
    let config = match args.into_config() {
        Ok(Some(c)) => c,
        Ok(None) => unreachable!("rerun handled above"),
        Err(e) => {
            eprintln!("error: {e}");
            return exit(e.exit_code());
        }
    };
    if dry_run {
        let findings = cli::validate(&config);
        for f in &findings {
            let kind = match f.kind {
                FindingKind::Invalid => "invalid",
                FindingKind::Cap => "cap",
            };
            println!("{kind}\t{}\t{}", f.field, f.message);
        }
        if findings.is_empty() {
            println!("ok");
            return exit(0);
        }
        let code = if findings.iter().any(|f| f.kind == FindingKind::Invalid) { 2 } else { 3 };
        return exit(code);
    }
    if config.seed_generated {
        eprintln!("no --seed given; using {}", config.seed);
    }
    match cli::run(&config) {
        Ok(rec) => {
            for o in &rec.outputs {
                println!("{}\t{}", config.out.join(&o.file).display(), o.sha256);
            }
            println!("{}", config.out.join(MANIFEST_FILE).display());
            exit(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code())
        }
    }
}
