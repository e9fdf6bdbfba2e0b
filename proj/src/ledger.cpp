#include "pqofh/ledger.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace pqofh {

uint64_t rss_high_water_bytes() {
    std::ifstream in("/proc/self/status");
    if (!in) return 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) != 0) continue;
        std::istringstream fields(line.substr(6));
        uint64_t kb = 0;
        fields >> kb;
        return kb * 1024;
    }
    return 0;
}

}  // namespace pqofh
