use rsp::runner::{run, Command, ExperimentConfig, Format};
use rsp::{Direction, RngStream};

fn quick(command: Command, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(command, seed);
    cfg.params.samples = Some(match command {
        Command::TableRsp | Command::LowentSim => 10,
        _ => 500,
    });
    cfg.params.grid = Some(10);
    cfg
}

#[test]
fn every_subcommand_replays_byte_for_byte() {
    for command in Command::ALL {
        for format in [Format::Csv, Format::JsonLines] {
            let mut cfg = quick(command, 17);
            cfg.format = format;
            let a = run(&cfg).unwrap().rendered;
            let b = run(&cfg).unwrap().rendered;
            let c = run(&cfg).unwrap().rendered;
            assert!(a == b && b == c, "{command} is not deterministic");
            assert!(a.ends_with(b"\n"));
            assert!(std::str::from_utf8(&a).is_ok());
        }
    }
}

#[test]
fn seeds_change_monte_carlo_output() {
    let a = run(&quick(Command::QuditMeasure, 1)).unwrap().rendered;
    let b = run(&quick(Command::QuditMeasure, 2)).unwrap().rendered;
    assert_ne!(a, b);
}

#[test]
fn written_file_matches_rendered_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(Command::Equatorial, 3);
    cfg.out = Some(dir.path().join("eq.csv"));
    let report = run(&cfg).unwrap();
    assert_eq!(std::fs::read(dir.path().join("eq.csv")).unwrap(), report.rendered);
    // nothing but the output file is left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn transcripts_audit_to_their_totals() {
    let mut rng = RngStream::new(4);
    let targets: Vec<_> = (0..8).map(|_| rsp::qmath::haar_state(2, &mut rng)).collect();
    for _ in 0..20 {
        let run = rsp::highent::table_rsp(8, 2, &targets, Some(40), &mut rng).unwrap();
        let (fwd, bwd) = run.transcript.audit();
        assert_eq!(fwd, run.transcript.bits_forward);
        assert_eq!(bwd, run.transcript.bits_backward);
        assert!(run.transcript.messages().iter().all(|m| m.direction == Direction::Forward));
    }
}
