# 砖块铺砌（brane tiling）计算工具配置文件

# 搜索界限
DEFAULT_BUDGET = 10**6  # 等价判定时最多访问的路径数 / 每个长度最多枚举的路径数
DEFAULT_MAX_LEN = 10  # 可消性搜索的最大路径长度
DEFAULT_LEN_BOUND = 16  # 圈幺半群枚举与条件2见证搜索的路径长度界
DEFAULT_SEPARATION_LEN = 6  # 标注分离性检查的默认长度

# 条件2与中心元素
MAX_WITNESSES_PER_RAY = 8  # 每个顶点、每个射线方向最多记录的见证圈数
MAX_CENTRAL_ALTERNATIVES = 4  # 检查唯一性时每个顶点最多比较的备选圈数

# 退出码
EXIT_COMPUTED = 0  # 计算完成
EXIT_FALSIFIED = 1  # 性质被否定（例如找到反例）
EXIT_INCONCLUSIVE = 2  # 在给定界限下无法判定
EXIT_INPUT_ERROR = 3  # 输入错误

# 文件
DATA_DIR = "data"
TILING_SUFFIX = ".tiling"
RING_SUFFIX = ".ring"

# 报告
REPORT_WIDTH = 80  # 报告分隔线宽度
