#ifndef ARRAYSYNTH_ERRORS_HPP
#define ARRAYSYNTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace arraysynth {

// Error categories map to process exit codes in the CLI:
// validation_error -> 2, numeric_error -> 3, io_error -> 4.

class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// -- validation ----------------------------------------------------------

class dimension_error : public validation_error {
public:
  explicit dimension_error(const std::string& what) : validation_error(what) {}
};

class domain_error : public validation_error {
public:
  explicit domain_error(const std::string& what) : validation_error(what) {}
};

class config_error : public validation_error {
public:
  explicit config_error(const std::string& what) : validation_error(what) {}
};

class assignment_error : public validation_error {
public:
  explicit assignment_error(const std::string& what) : validation_error(what) {}
};

class missing_sample_error : public validation_error {
public:
  explicit missing_sample_error(const std::string& what) : validation_error(what) {}
};

class invalid_input_error : public validation_error {
public:
  explicit invalid_input_error(const std::string& what) : validation_error(what) {}
};

// -- numeric -------------------------------------------------------------

class resonant_coupling_error : public numeric_error {
public:
  explicit resonant_coupling_error(const std::string& what) : numeric_error(what) {}
};

class resonant_termination_error : public numeric_error {
public:
  explicit resonant_termination_error(const std::string& what) : numeric_error(what) {}
};

class degenerate_column_error : public numeric_error {
public:
  explicit degenerate_column_error(const std::string& what) : numeric_error(what) {}
};

class nondiagonalizable_error : public numeric_error {
public:
  explicit nondiagonalizable_error(const std::string& what) : numeric_error(what) {}
};

class sweep_failed_error : public numeric_error {
public:
  explicit sweep_failed_error(const std::string& what) : numeric_error(what) {}
};

class gradient_undefined_error : public numeric_error {
public:
  explicit gradient_undefined_error(const std::string& what) : numeric_error(what) {}
};

class fit_infeasible_error : public numeric_error {
public:
  explicit fit_infeasible_error(const std::string& what) : numeric_error(what) {}
};

class singularity_error : public numeric_error {
public:
  explicit singularity_error(const std::string& what) : numeric_error(what) {}
};

}  // namespace arraysynth

#endif
