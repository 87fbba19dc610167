use cordic_dct::cli::run;
use cordic_dct::{pgm, testimage};

fn cli(args: &[&str], stdin: &str) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("cordic-dct").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn body(out: &str) -> &str {
    out.strip_suffix("status: ok\n")
        .expect("ends with ok status")
}

#[test]
fn every_output_ends_with_status() {
    let cases: &[&[&str]] = &[
        &["decompose", "--angle", "3pi/8"],
        &["decompose", "--angle", "deg:120"],
        &["table", "--rotators", "--format", "json"],
        &[
            "rotate", "--angle", "0.3", "--x", "1", "--y", "1", "--format", "csv",
        ],
        &["dct", "--format", "csv"],
        &["frobnicate"],
    ];
    for args in cases {
        let (code, out) = cli(args, "1 2 3 4 5 6 7 8");
        let last = out.lines().last().unwrap();
        assert!(last.starts_with("status: "), "{args:?}: {out}");
        assert_eq!(code == 0, last == "status: ok", "{args:?}");
    }
}

#[test]
fn table_csv_matches_rotator_cells() {
    let (code, out) = cli(&["table", "--rotators", "--format", "csv"], "");
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(body(&out).as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let cells: Vec<(&str, &str)> = rows.iter().map(|r| (&r[2], &r[3])).collect();
    assert_eq!(
        cells,
        [
            ("0", "+"),
            ("0", "+"),
            ("0/1/4/7", "++--"),
            ("0/1/4/7/10/12", "++---+"),
            ("2/4/6/9", "+-+-"),
            ("2/4/6/9/13", "+-+-+"),
            ("1/3/10", "+++"),
            ("1/3/10", "+++"),
        ]
    );
}

#[test]
fn angles_accept_expressions() {
    let (_, a) = cli(
        &[
            "decompose",
            "--angle",
            "pi/16",
            "--eps",
            "1e-4",
            "--format",
            "json",
        ],
        "",
    );
    let (_, b) = cli(
        &[
            "decompose",
            "--angle",
            "deg:11.25",
            "--eps",
            "1e-4",
            "--format",
            "json",
        ],
        "",
    );
    let (_, c) = cli(
        &[
            "decompose",
            "--angle",
            "0.19634954084936207",
            "--eps",
            "1e-4",
            "--format",
            "json",
        ],
        "",
    );
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn literal_policy_flag() {
    let (_, out) = cli(
        &["decompose", "--angle", "3pi/8", "--policy", "literal"],
        "",
    );
    assert!(out.contains("i: 0/2/3/6/8/9/10"), "{out}");
}

#[test]
fn fixed_overflow_is_an_error_for_rotate() {
    let (code, out) = cli(
        &[
            "rotate",
            "--angle",
            "pi/3",
            "--x",
            "7.9",
            "--y",
            "7.9",
            "--mode",
            "fixed",
            "--no-compensate",
        ],
        "",
    );
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("status: error: fixed-point overflow"), "{out}");
}

#[test]
fn dct_reads_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("block.txt");
    let block: Vec<String> = (0..64).map(|n| ((n * 13) % 255).to_string()).collect();
    std::fs::write(&path, block.join("\n")).unwrap();
    let (code, out) = cli(
        &[
            "dct",
            "--input",
            path.to_str().unwrap(),
            "--eps",
            "1e-4",
            "--format",
            "json",
        ],
        "",
    );
    assert_eq!(code, 0, "{out}");
    let json: serde_json::Value = serde_json::from_str(body(&out)).unwrap();
    assert_eq!(json["coefficients"].as_array().unwrap().len(), 64);
    assert!(json["max_abs_error"].as_f64().unwrap() < 1.0);
}

#[test]
fn eval_pgm_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("scene.pgm");
    pgm::write(&testimage::scene(64, 48, 5), &image).unwrap();
    let mut reports = Vec::new();
    for (n, extra) in [[].as_slice(), &["--serial"]].iter().enumerate() {
        let out_path = dir.path().join(format!("report{n}.json"));
        let mut args = vec![
            "eval",
            image.to_str().unwrap(),
            "--format",
            "json",
            "--out",
            out_path.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let (code, out) = cli(&args, "");
        assert_eq!(code, 0, "{out}");
        assert!(out.ends_with("status: ok\n"));
        reports.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let json: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 10);
}

#[test]
fn eval_missing_file_fails_cleanly() {
    let (code, out) = cli(&["eval", "/nonexistent/lena.pgm"], "");
    assert_eq!(code, 1);
    assert!(out.starts_with("status: error: "), "{out}");
}

#[test]
fn eval_fixed_mode_reports_saturation_column() {
    let (code, out) = cli(
        &[
            "eval",
            "--size",
            "32",
            "--mode",
            "fixed",
            "--bits",
            "16",
            "--frac",
            "8",
            "--qualities",
            "90",
            "--format",
            "csv",
        ],
        "",
    );
    assert_eq!(code, 0, "{out}");
    let line = body(&out).lines().nth(1).unwrap();
    let sat: u64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!(sat > 0, "{line}");
}
