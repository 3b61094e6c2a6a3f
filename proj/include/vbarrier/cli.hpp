#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbarrier/mc_oracle.hpp"
#include "vbarrier/model.hpp"
#include "vbarrier/pricer.hpp"

namespace vbarrier::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,
    kKnockedOut = 2,
    kVerificationFailed = 3,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { price, curve, verify };
enum class OutputFormat { csv, svg };

struct Sweep {
    std::string name;  // a, theta or rho
    std::vector<double> values;
};

struct Grid {
    double min = 85.0;
    double max = 128.0;
    int count = 25;
};

struct JobConfig {
    Command command = Command::price;
    MarketState market;
    OptionSpec option;
    VasicekParams params;
    std::optional<Sweep> sweep;
    Grid grid;
    CurveAxis axis = CurveAxis::spot;
    MCConfig mc;
    bool verify = false;
    std::string out = "-";
    OutputFormat format = OutputFormat::csv;
    BondFormula bond_formula = BondFormula::standard;
};

using KeyValues = std::map<std::string, std::string>;

// Keys accepted in config files and as --key flags, with their defaults.
const KeyValues& default_values();

// Parses a flat `key = value` file; '#' starts a comment. Keys may use '-'
// or '_'. Throws ConfigError naming any unknown key.
KeyValues parse_config_text(const std::string& text);

// Typed configuration from merged key/values; errors name the bad key.
JobConfig build_config(Command command, const KeyValues& values);

// Shortest round-trip decimal representation.
std::string format_number(double v);

// First column is named `axis_name` ("spot" unless the grid is forwards).
std::string render_csv(const std::vector<double>& spots, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& prices,
                       const std::string& axis_name = "spot");
std::string render_svg(const std::vector<double>& spots, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& prices,
                       const std::string& axis_name = "spot");

int run_price(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int run_curve(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int run_verify(const JobConfig& cfg, std::ostream& out, std::ostream& err);

// Entry point behind the executable; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vbarrier::cli
