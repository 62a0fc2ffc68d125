fn main() -> std::process::ExitCode {
    conic_cond::harness::main_exit()
}
