#ifndef DTMI_ERROR_HPP_
#define DTMI_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dtmi {

// All library errors carry a category that the CLI maps onto exit codes:
// validation -> 2, infeasible -> 3, io -> 2.
class Error : public std::runtime_error {
 public:
  enum class Kind { validation, infeasible, io };

  Error(Kind kind, const std::string& name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_;
  std::string name_;
};

inline Error validation_error(const std::string& name, const std::string& what) {
  return Error(Error::Kind::validation, name, what);
}

inline Error infeasible_error(const std::string& name, const std::string& what) {
  return Error(Error::Kind::infeasible, name, what);
}

inline Error io_error(const std::string& name, const std::string& what) {
  return Error(Error::Kind::io, name, what);
}

}  // namespace dtmi

#endif  // DTMI_ERROR_HPP_
